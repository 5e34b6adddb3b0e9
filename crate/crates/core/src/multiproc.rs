//! Global fixed-priority tests on `M` identical processors, instantiated with
//! `alpha_i = beta_i = 1/M`.
//!
//! All tests evaluate the window extension `y = 0` only: for the DM form the
//! condition is weakest there, and the RM forms do not depend on it.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::k2q::{self, KPointEntry};
use crate::task::{DeadlineModel, Task, TaskSet};
use crate::verdict::{Condition, Status, Verdict, TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GlobalContext {
    pub m: usize,
    /// Largest utilization among the task and its higher-priority tasks.
    pub u_max: f64,
    /// `max(max_{j<k} U_j, C_k / D_k)`.
    pub delta_max: f64,
}

pub fn global_context(ts: &TaskSet, index: usize) -> Result<GlobalContext> {
    let task = ts.task(index)?;
    let hp_max = ts.tasks()[..index]
        .iter()
        .map(Task::utilization)
        .fold(0.0, f64::max);
    Ok(GlobalContext {
        m: ts.processors(),
        u_max: hp_max.max(task.utilization()),
        delta_max: hp_max.max(task.density()),
    })
}

fn require_global_rm(ts: &TaskSet, index: usize, cond: Condition) -> Result<Option<Verdict>> {
    let task = ts.task(index)?;
    if ts.model() != DeadlineModel::Implicit {
        return Ok(Some(Verdict::not_applicable(cond, "needs implicit deadlines")));
    }
    if let Some(t) = ts.tasks()[..index].iter().find(|t| t.period > task.period) {
        return Ok(Some(Verdict::not_applicable(
            cond,
            format!("not rate-monotonic: {} has a longer period than {}", t.id, task.id),
        )));
    }
    Ok(None)
}

/// Quadratic global RM test:
/// `U_max <= 1 - (2/M) ΣU + (0.5/M^2)((ΣU)^2 + ΣU^2)` over the
/// higher-priority tasks.
pub fn grm_quadratic_test(ts: &TaskSet, index: usize) -> Result<Verdict> {
    let cond = Condition::GlobalRmQuadratic;
    if let Some(v) = require_global_rm(ts, index, cond)? {
        return Ok(v);
    }
    let ctx = global_context(ts, index)?;
    let m = ctx.m as f64;
    let utils: Vec<f64> = ts.tasks()[..index].iter().map(Task::utilization).collect();
    Ok(Verdict::compare(
        cond,
        ctx.u_max,
        k2q::uniform_rhs_closed(&utils, 1.0 / m, 1.0 / m),
    ))
}

/// Right-hand side of the global RM utilization test for `k` tasks.
pub fn grm_util_bound(k: usize, u_max: f64) -> f64 {
    let kf = k as f64;
    ((kf - 1.0) / kf) * (2.0 - (2.0 + 2.0 * u_max * kf / (kf - 1.0)).sqrt())
}

/// Limit of [`grm_util_bound`] as `k` grows: `2 - sqrt(2 + 2 U_max)`.
pub fn grm_util_bound_limit(u_max: f64) -> f64 {
    2.0 - (2.0 + 2.0 * u_max).sqrt()
}

/// Utilization form of the global RM test:
/// `Σ_{i<k} U_i / M <= ((k-1)/k)(2 - sqrt(2 + 2 U_max k/(k-1)))`.
pub fn grm_util_test(ts: &TaskSet, index: usize) -> Result<Verdict> {
    let cond = Condition::GlobalRmUtil;
    if let Some(v) = require_global_rm(ts, index, cond)? {
        return Ok(v);
    }
    if index == 0 {
        // Alone on a processor the task only needs `U_k <= 1`.
        return Ok(Verdict::compare(cond, ts.task(0)?.utilization(), 1.0));
    }
    let ctx = global_context(ts, index)?;
    let hp_util: f64 = ts.tasks()[..index].iter().map(Task::utilization).sum();
    Ok(Verdict::compare(
        cond,
        hp_util / ctx.m as f64,
        grm_util_bound(index + 1, ctx.u_max),
    ))
}

/// Root of `x = 2 - sqrt(2 + 2x)` on `[0, 1]`, by bisection to 1e-12.
pub fn grm_capacity_root() -> f64 {
    let f = |x: f64| x - (2.0 - (2.0 + 2.0 * x).sqrt());
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Capacity augmentation factor of global RM, the reciprocal of
/// [`grm_capacity_root`].
pub fn grm_capacity_factor() -> f64 {
    1.0 / grm_capacity_root()
}

/// Quadratic global DM test for constrained deadlines:
/// `Δ_max <= 1 - (1/M) Σ(U_i + C_i/D_k) + (1/M^2) Σ_i U_i Σ_{l>=i} C_l/D_k`
/// with the higher-priority tasks in nonincreasing period order.
pub fn gdm_quadratic_test(ts: &TaskSet, index: usize) -> Result<Verdict> {
    let cond = Condition::GlobalDmQuadratic;
    let task = ts.task(index)?;
    if !ts.model().is_constrained() {
        return Ok(Verdict::not_applicable(cond, "needs constrained deadlines"));
    }
    let m = ts.processors() as f64;
    let total: f64 = ts.tasks()[..=index].iter().map(Task::utilization).sum();
    if total > m + TOLERANCE {
        return Ok(Verdict::not_applicable(
            cond,
            format!("utilization up to the task is {total:.6} > M"),
        ));
    }
    let hp = &ts.tasks()[..index];
    let window: f64 = hp.iter().map(|t| t.wcet / task.deadline).sum();
    if window > m + TOLERANCE {
        return Ok(Verdict::not_applicable(
            cond,
            format!("higher-priority execution over D_k is {window:.6} > M"),
        ));
    }
    let mut sorted: Vec<&Task> = hp.iter().collect();
    sorted.sort_by(|a, b| b.period.total_cmp(&a.period));
    let entries: Vec<KPointEntry> = sorted
        .into_iter()
        .map(|t| KPointEntry::from_task(t, 1.0 / m, 1.0 / m))
        .collect();
    let ctx = global_context(ts, index)?;
    Ok(Verdict::compare(
        cond,
        ctx.delta_max,
        k2q::quadratic_rhs(&entries, task.deadline),
    ))
}

/// The term that exceeds 1/3 for a task the DM test cannot accept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "term", content = "value")]
pub enum Witness {
    /// `Δ_max`
    Delta(f64),
    /// `Σ_{i<k} U_i / M`
    Utilization(f64),
    /// `Σ_{i<k} C_i / (M D_k)`
    Density(f64),
}

impl Witness {
    pub fn label(&self) -> &'static str {
        match self {
            Witness::Delta(_) => "delta",
            Witness::Utilization(_) => "utilization",
            Witness::Density(_) => "density",
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            Witness::Delta(v) | Witness::Utilization(v) | Witness::Density(v) => v,
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {:.6}", self.label(), self.value())
    }
}

/// Pigeonhole witness for a task that failed (or could not use) the DM
/// test: one of `Δ_max`, `ΣU/M`, `ΣC/(M D_k)` is above 1/3.
pub fn gdm_speedup_witness(ts: &TaskSet, index: usize) -> Result<Witness> {
    let verdict = gdm_quadratic_test(ts, index)?;
    match verdict.status {
        Status::Schedulable => return Err(Error::AcceptedSet),
        Status::NotApplicable if !ts.model().is_constrained() => {
            return Err(Error::NotApplicable("needs constrained deadlines".into()))
        }
        _ => {}
    }
    let task = ts.task(index)?;
    let ctx = global_context(ts, index)?;
    let m = ctx.m as f64;
    let hp = &ts.tasks()[..index];
    let candidates = [
        Witness::Delta(ctx.delta_max),
        Witness::Utilization(hp.iter().map(Task::utilization).sum::<f64>() / m),
        Witness::Density(hp.iter().map(|t| t.wcet).sum::<f64>() / (m * task.deadline)),
    ];
    // With Σ_{i<=k} U_i > M the utilization or delta term is already large;
    // still, report the first term above 1/3.
    candidates
        .into_iter()
        .find(|w| w.value() > 1.0 / 3.0)
        .ok_or_else(|| Error::InvalidInstance("no pigeonhole term exceeds 1/3".into()))
}
