use crate::error::Result;
use crate::task::TaskSet;
use crate::verdict::{Condition, Verdict};

use super::{all_ticks, interference, ticks};

/// Exact time-demand analysis for a task with `D_k <= T_k` on one processor.
///
/// Iterates `t <- C_k + Σ ceil(t/T_i) C_i` from `C_k + Σ C_i` until it
/// settles or passes `D_k`. The verdict carries the last iterate and `D_k`.
pub fn tda_exact(ts: &TaskSet, index: usize) -> Result<Verdict> {
    let cond = Condition::ExactTda;
    let task = ticks(ts.task(index)?)?;
    let hp = all_ticks(ts.higher_priority(index)?)?;
    if ts.processors() != 1 {
        return Ok(Verdict::not_applicable(cond, "uniprocessor analysis on a multiprocessor set"));
    }
    if task.d > task.t {
        return Ok(Verdict::not_applicable(cond, "needs D_k <= T_k"));
    }
    let mut t = task.c + hp.iter().map(|x| x.c).sum::<u64>();
    while t <= task.d {
        let demand = task.c + interference(&hp, t);
        if demand == t {
            break;
        }
        t = demand;
    }
    Ok(Verdict::compare(cond, t as f64, task.d as f64))
}
