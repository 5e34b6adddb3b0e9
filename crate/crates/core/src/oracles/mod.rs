//! Independent ground-truth engines used to validate the closed forms.
//!
//! The schedulability oracles work on integer ticks only, so every decision
//! they make is exact.

mod busy_window;
mod lp;
mod permutation;
mod sim;
mod tda;

pub use busy_window::{busy_window_exact, ExactResponse};
pub use lp::{lp_closed_point, lp_min_ck, MAX_LP_ENTRIES};
pub use permutation::{permutation_minmax, Objective, MAX_PERMUTATION_ENTRIES};
pub use sim::{simulate_global_fp, EventKind, SimConfig, SimEvent, SimTrace, DEFAULT_HORIZON_CAP};
pub use tda::tda_exact;

use crate::error::{Error, Result};
use crate::task::Task;

/// Largest integer that survives the round trip through `f64`.
const MAX_EXACT: f64 = 9_007_199_254_740_992.0;

fn exact(task: &Task, field: &'static str, value: f64) -> Result<u64> {
    if value.fract() == 0.0 && value > 0.0 && value <= MAX_EXACT {
        Ok(value as u64)
    } else {
        Err(Error::NotExact {
            id: task.id.clone(),
            field,
            value,
        })
    }
}

/// Integer `(C, T, D)` of a task.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Ticks {
    pub c: u64,
    pub t: u64,
    pub d: u64,
}

pub(crate) fn ticks(task: &Task) -> Result<Ticks> {
    Ok(Ticks {
        c: exact(task, "C", task.wcet)?,
        t: exact(task, "T", task.period)?,
        d: exact(task, "D", task.deadline)?,
    })
}

pub(crate) fn all_ticks(tasks: &[Task]) -> Result<Vec<Ticks>> {
    tasks.iter().map(ticks).collect()
}

/// `Σ ceil(t / T_i) C_i`
pub(crate) fn interference(hp: &[Ticks], t: u64) -> u64 {
    hp.iter().map(|x| t.div_ceil(x.t) * x.c).sum()
}
