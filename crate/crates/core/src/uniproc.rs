//! Uniprocessor fixed-priority analysis for sporadic tasks with arbitrary
//! deadlines, all instantiated with `alpha_i = beta_i = 1`.
//!
//! Two different last-release orderings are used and must not be mixed up:
//! the window test orders `hp1` by `(ceil(D_k/T_i) - 1) * T_i`, while the
//! response-time bounds order the higher-priority tasks by nonincreasing
//! period.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::k2q::{self, KPointEntry, KPointInstance};
use crate::task::{partition_hp, Task, TaskSet};
use crate::verdict::{Condition, ResponseBound, Verdict, TOLERANCE};

/// The task under analysis with the `hp2` tasks folded in: one window of
/// length `D_k` carrying `ceil(D_k/T_k)` jobs of the task plus one job of
/// every `hp2` task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VirtualTask {
    pub ck_prime: f64,
    pub dk: f64,
    pub tk: f64,
}

pub fn virtual_task(ts: &TaskSet, index: usize) -> Result<VirtualTask> {
    let task = ts.task(index)?;
    let (_, hp2) = partition_hp(ts, index)?;
    let jobs = (task.deadline / task.period).ceil();
    let carry: f64 = hp2.iter().map(|t| t.wcet).sum();
    Ok(VirtualTask {
        ck_prime: jobs * task.wcet + carry,
        dk: task.deadline,
        tk: task.deadline,
    })
}

fn require_uniprocessor(ts: &TaskSet, condition: Condition) -> Option<Verdict> {
    (ts.processors() != 1)
        .then(|| Verdict::not_applicable(condition, "uniprocessor test on a multiprocessor set"))
}

fn unit_entries<'a>(tasks: impl IntoIterator<Item = &'a Task>) -> Vec<KPointEntry> {
    tasks
        .into_iter()
        .map(|t| KPointEntry::from_task(t, 1.0, 1.0))
        .collect()
}

/// Higher-priority tasks sorted by nonincreasing period (stable).
fn by_period_desc(hp: &[Task]) -> Vec<&Task> {
    let mut sorted: Vec<&Task> = hp.iter().collect();
    sorted.sort_by(|a, b| b.period.total_cmp(&a.period));
    sorted
}

fn utilization_up_to(ts: &TaskSet, index: usize) -> f64 {
    ts.tasks()[..=index].iter().map(Task::utilization).sum()
}

/// Window test: checks that the level-k busy window started at a critical
/// instant closes within `D_k`.
pub fn test_arbitrary_window(ts: &TaskSet, index: usize) -> Result<Verdict> {
    let cond = Condition::WindowArbitrary;
    let vt = virtual_task(ts, index)?;
    if let Some(v) = require_uniprocessor(ts, cond) {
        return Ok(v);
    }
    let (mut hp1, _) = partition_hp(ts, index)?;
    let dk = vt.dk;
    let density: f64 = hp1.iter().map(|t| t.wcet / dk).sum();
    if density > 1.0 + TOLERANCE {
        return Ok(Verdict::not_applicable(
            cond,
            format!("hp1 execution over D_k is {density:.6} > 1"),
        ));
    }
    let util: f64 = hp1.iter().map(Task::utilization).sum();
    if util > 1.0 + TOLERANCE {
        return Ok(Verdict::not_applicable(
            cond,
            format!("hp1 utilization is {util:.6} > 1"),
        ));
    }
    let last_release = |t: &Task| ((dk / t.period).ceil() - 1.0) * t.period;
    hp1.sort_by(|a, b| last_release(a).total_cmp(&last_release(b)));
    let entries = unit_entries(&hp1);
    Ok(Verdict::compare(
        cond,
        vt.ck_prime / dk,
        k2q::quadratic_rhs(&entries, dk),
    ))
}

/// Upper bound on the finishing time of the `h`-th job of the task in its
/// busy window (measured from the window start).
pub fn rkh_bound(ts: &TaskSet, index: usize, h: u32) -> Result<ResponseBound> {
    if h < 1 {
        return Err(Error::InvalidInstance("job number h must be at least 1".into()));
    }
    let task = ts.task(index)?;
    let hp = ts.higher_priority(index)?;
    let entries = unit_entries(by_period_desc(hp));
    let inst = KPointInstance::new(entries, f64::from(h) * task.wcet, None)?;
    Ok(k2q::response_bound_general(&inst))
}

/// Worst-case response-time bound; needs `Σ_{i<=k} U_i <= 1`.
pub fn wcrt_bound(ts: &TaskSet, index: usize) -> Result<ResponseBound> {
    ts.task(index)?;
    if ts.processors() != 1 {
        return Err(Error::NotApplicable("uniprocessor bound on a multiprocessor set".into()));
    }
    let util = utilization_up_to(ts, index);
    if util > 1.0 + TOLERANCE {
        return Err(Error::NotApplicable(format!(
            "utilization up to the task is {util:.6} > 1"
        )));
    }
    rkh_bound(ts, index, 1)
}

/// The earlier utilization-based response bound
/// `(C_k + ΣC_i - ΣU_i C_i) / (1 - ΣU_i)`, kept for comparison.
pub fn bini_bound(ts: &TaskSet, index: usize) -> Result<ResponseBound> {
    let task = ts.task(index)?;
    let hp = ts.higher_priority(index)?;
    let util: f64 = hp.iter().map(Task::utilization).sum();
    if util >= 1.0 {
        return Ok(ResponseBound::Unbounded);
    }
    let wcet: f64 = hp.iter().map(|t| t.wcet).sum();
    let self_term: f64 = hp.iter().map(|t| t.utilization() * t.wcet).sum();
    Ok(ResponseBound::Finite(
        (task.wcet + wcet - self_term) / (1.0 - util),
    ))
}

/// Schedulability test from the response bound, in normalized form
/// `C_k/D_k <= 1 - ΣU - ΣC/D_k + Σ_i U_i Σ_{l>=i} C_l / D_k`.
pub fn response_sched_test(ts: &TaskSet, index: usize) -> Result<Verdict> {
    let cond = Condition::ResponseBound;
    let task = ts.task(index)?;
    if let Some(v) = require_uniprocessor(ts, cond) {
        return Ok(v);
    }
    let util = utilization_up_to(ts, index);
    if util > 1.0 + TOLERANCE {
        return Ok(Verdict::not_applicable(
            cond,
            format!("utilization up to the task is {util:.6} > 1"),
        ));
    }
    let entries = unit_entries(by_period_desc(ts.higher_priority(index)?));
    Ok(Verdict::compare(
        cond,
        task.density(),
        k2q::quadratic_rhs(&entries, task.deadline),
    ))
}

/// Both rate-monotonic utilization bounds for one task, with
/// `beta = T_k / D_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RmUtilBounds {
    /// Bound on `Σ_{i<k} U_i`; `None` without higher-priority tasks.
    pub exclusive: Option<f64>,
    /// Bound on `Σ_{i<=k} U_i`; `None` without higher-priority tasks.
    pub inclusive: Option<f64>,
    /// Accepts when either bound holds.
    pub verdict: Verdict,
}

/// Bound on `Σ_{i<k} U_i` under RM for the task with `beta = T_k/D_k` and
/// utilization `uk`, `k` counting the task itself.
pub fn rm_exclusive_bound(k: usize, beta: f64, uk: f64) -> f64 {
    let kf = k as f64;
    let s = kf / (kf - 1.0);
    ((kf - 1.0) / (beta * kf)) * (1.0 + beta - (1.0 + beta * beta + 2.0 * beta * beta * uk * s).sqrt())
}

/// Rate-monotonic utilization bounds. Requires RM order up to the task
/// (`T_i <= T_k`) and `Σ_{i<=k} U_i <= 1`.
pub fn rm_util_bounds(ts: &TaskSet, index: usize) -> Result<RmUtilBounds> {
    let task = ts.task(index)?;
    let na = |reason: String| RmUtilBounds {
        exclusive: None,
        inclusive: None,
        verdict: Verdict::not_applicable(Condition::RmUtilInclusive, reason),
    };
    if ts.processors() != 1 {
        return Ok(na("uniprocessor test on a multiprocessor set".into()));
    }
    let hp = ts.higher_priority(index)?;
    if let Some(t) = hp.iter().find(|t| t.period > task.period) {
        return Ok(na(format!(
            "not rate-monotonic: {} has a longer period than {}",
            t.id, task.id
        )));
    }
    let util = utilization_up_to(ts, index);
    if util > 1.0 + TOLERANCE {
        return Ok(na(format!("utilization up to the task is {util:.6} > 1")));
    }
    if hp.is_empty() {
        return Ok(RmUtilBounds {
            exclusive: None,
            inclusive: None,
            verdict: Verdict::compare(Condition::RmUtilInclusive, task.density(), 1.0),
        });
    }
    let k = index + 1;
    let beta = task.period / task.deadline;
    let uk = task.utilization();
    let hp_util: f64 = hp.iter().map(Task::utilization).sum();
    let exclusive = rm_exclusive_bound(k, beta, uk);
    let inclusive = k2q::util_bound_inclusive_beta(k, 1.0, beta)?;
    let by_exclusive = Verdict::compare(Condition::RmUtilExclusive, hp_util, exclusive);
    let verdict = if by_exclusive.is_schedulable() {
        by_exclusive
    } else {
        Verdict::compare(Condition::RmUtilInclusive, hp_util + uk, inclusive)
    };
    Ok(RmUtilBounds {
        exclusive: Some(exclusive),
        inclusive: Some(inclusive),
        verdict,
    })
}
