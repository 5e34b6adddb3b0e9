//! The generic k-point machinery over abstract coefficient instances.
//!
//! A higher-priority task enters the analysis only through four numbers: the
//! coefficients `alpha` and `beta`, an execution-time term `wcet` and a
//! utilization term `util`. The order of [`KPointInstance::entries`] is the
//! last-release ordering: entry 0 releases its last job earliest in the
//! window of interest.
//!
//! Every bound here is built from two sums and one cross term:
//!
//! * `sum_a = Σ alpha_i * util_i`
//! * `sum_b = Σ beta_i * wcet_i`
//! * `cross = Σ_i alpha_i * util_i * Σ_{l >= i} beta_l * wcet_l`
//!
//! Only `cross` depends on the ordering.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::task::Task;
use crate::verdict::{Condition, ResponseBound, Verdict, TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KPointEntry {
    pub alpha: f64,
    pub beta: f64,
    pub wcet: f64,
    pub util: f64,
}

impl KPointEntry {
    pub fn new(alpha: f64, beta: f64, wcet: f64, util: f64) -> Self {
        KPointEntry {
            alpha,
            beta,
            wcet,
            util,
        }
    }

    /// Entry for a sporadic task with the given coefficients.
    pub fn from_task(task: &Task, alpha: f64, beta: f64) -> Self {
        KPointEntry::new(alpha, beta, task.wcet, task.utilization())
    }

    /// `beta * wcet`
    pub fn weighted_wcet(&self) -> f64 {
        self.beta * self.wcet
    }

    /// `alpha * util`
    pub fn weighted_util(&self) -> f64 {
        self.alpha * self.util
    }

    /// Sort key of the worst-case ordering.
    pub fn ratio(&self) -> f64 {
        self.weighted_wcet() / self.weighted_util()
    }

    fn validate(&self) -> Result<()> {
        let ok = self.alpha > 0.0
            && self.alpha.is_finite()
            && self.beta > 0.0
            && self.beta.is_finite()
            && self.wcet >= 0.0
            && self.wcet.is_finite()
            && self.util > 0.0
            && self.util <= 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInstance(format!("bad entry {self:?}")))
        }
    }
}

/// Input of the k-point test for one task under analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KPointInstance {
    pub entries: Vec<KPointEntry>,
    /// Execution time of the task under analysis.
    pub ck: f64,
    /// Length of the window of interest; not needed for response bounds.
    pub tk: Option<f64>,
}

impl KPointInstance {
    pub fn new(entries: Vec<KPointEntry>, ck: f64, tk: Option<f64>) -> Result<Self> {
        for e in &entries {
            e.validate()?;
        }
        if !(ck > 0.0 && ck.is_finite()) {
            return Err(Error::InvalidInstance(format!("ck must be positive, got {ck}")));
        }
        if let Some(tk) = tk {
            if !(tk > 0.0 && tk.is_finite()) {
                return Err(Error::InvalidInstance(format!("tk must be positive, got {tk}")));
            }
        }
        Ok(KPointInstance { entries, ck, tk })
    }

    /// Number of tasks including the one under analysis.
    pub fn k(&self) -> usize {
        self.entries.len() + 1
    }

    pub fn sum_a(&self) -> f64 {
        self.entries.iter().map(KPointEntry::weighted_util).sum()
    }

    pub fn sum_b(&self) -> f64 {
        self.entries.iter().map(KPointEntry::weighted_wcet).sum()
    }

    pub fn cross(&self) -> f64 {
        cross_term(&self.entries)
    }

    /// Same instance with `entries` reordered.
    pub fn with_entries(&self, entries: Vec<KPointEntry>) -> Self {
        KPointInstance {
            entries,
            ck: self.ck,
            tk: self.tk,
        }
    }

    fn require_tk(&self) -> Result<f64> {
        self.tk
            .ok_or_else(|| Error::InvalidInstance("window length tk is required".into()))
    }
}

/// `Σ_i alpha_i util_i Σ_{l >= i} beta_l wcet_l` in the given order.
pub fn cross_term(entries: &[KPointEntry]) -> f64 {
    let mut suffix = 0.0;
    let mut total = 0.0;
    for e in entries.iter().rev() {
        suffix += e.weighted_wcet();
        total += e.weighted_util() * suffix;
    }
    total
}

/// Evaluates the k-point condition at explicit points `t_1 <= ... <= t_k`:
/// schedulable iff for some `j`,
/// `ck + Σ_i alpha_i t_i util_i + Σ_{i<j} beta_i wcet_i <= t_j`.
///
/// The verdict reports the smallest ratio `lhs_j / t_j` against 1.
pub fn kpoint_test_direct(inst: &KPointInstance, points: &[f64]) -> Result<Verdict> {
    if points.len() != inst.k() {
        return Err(Error::PointCount {
            expected: inst.k(),
            got: points.len(),
        });
    }
    if points.windows(2).any(|w| w[1] < w[0]) || points.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::PointOrder);
    }
    if points[points.len() - 1] <= 0.0 {
        return Err(Error::PointOrder);
    }
    let load = inst.ck
        + inst
            .entries
            .iter()
            .zip(points)
            .map(|(e, t)| e.weighted_util() * t)
            .sum::<f64>();
    let mut prefix = 0.0;
    let mut best = f64::INFINITY;
    for (j, &tj) in points.iter().enumerate() {
        if j > 0 {
            prefix += inst.entries[j - 1].weighted_wcet();
        }
        if tj > 0.0 {
            best = best.min((load + prefix) / tj);
        }
    }
    Ok(Verdict::compare(Condition::KpointDirect, best, 1.0))
}

/// Right-hand side of the general quadratic condition on `ck / tk`:
/// `1 - sum_a - (sum_b - cross) / tk`.
pub fn quadratic_rhs(entries: &[KPointEntry], tk: f64) -> f64 {
    let sum_a: f64 = entries.iter().map(KPointEntry::weighted_util).sum();
    let sum_b: f64 = entries.iter().map(KPointEntry::weighted_wcet).sum();
    1.0 - sum_a - (sum_b - cross_term(entries)) / tk
}

/// The general quadratic bound. Requires `sum_a <= 1` and `sum_b <= tk`;
/// otherwise the verdict is not applicable.
pub fn quadratic_bound_general(inst: &KPointInstance) -> Result<Verdict> {
    let tk = inst.require_tk()?;
    let sum_a = inst.sum_a();
    if sum_a > 1.0 + TOLERANCE {
        return Ok(Verdict::not_applicable(
            Condition::QuadraticGeneral,
            format!("sum of alpha*U is {sum_a:.6} > 1"),
        ));
    }
    let sum_b = inst.sum_b();
    if sum_b / tk > 1.0 + TOLERANCE {
        return Ok(Verdict::not_applicable(
            Condition::QuadraticGeneral,
            format!("sum of beta*C is {sum_b:.6} > tk = {tk:.6}"),
        ));
    }
    Ok(Verdict::compare(
        Condition::QuadraticGeneral,
        inst.ck / tk,
        quadratic_rhs(&inst.entries, tk),
    ))
}

/// Indices of `entries` in the worst-case last-release order: nonincreasing
/// `beta*wcet / (alpha*util)`, ties in input order.
pub fn worst_case_order(entries: &[KPointEntry]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..entries.len()).collect();
    idx.sort_by(|&a, &b| entries[b].ratio().total_cmp(&entries[a].ratio()));
    idx
}

/// Worst-case ordering for the quadratic schedulability condition: it
/// minimizes the right-hand side over all orderings.
pub fn worst_case_ordering_sched(entries: &[KPointEntry]) -> Vec<KPointEntry> {
    worst_case_order(entries).into_iter().map(|i| entries[i]).collect()
}

/// Worst-case ordering for the response bound: it maximizes the bound. Same
/// key as [`worst_case_ordering_sched`].
pub fn worst_case_ordering_response(entries: &[KPointEntry]) -> Vec<KPointEntry> {
    worst_case_ordering_sched(entries)
}

/// Pairwise form of the uniform-coefficient bound:
/// `1 - (alpha+beta) ΣU + alpha*beta Σ_i U_i Σ_{l>=i} U_l`.
pub fn uniform_rhs_pairwise(utils: &[f64], alpha: f64, beta: f64) -> f64 {
    let total: f64 = utils.iter().sum();
    let mut suffix = 0.0;
    let mut pairs = 0.0;
    for u in utils.iter().rev() {
        suffix += u;
        pairs += u * suffix;
    }
    1.0 - (alpha + beta) * total + alpha * beta * pairs
}

/// Closed form of the uniform-coefficient bound:
/// `1 - (alpha+beta) ΣU + alpha*beta/2 ((ΣU)^2 + ΣU^2)`.
pub fn uniform_rhs_closed(utils: &[f64], alpha: f64, beta: f64) -> f64 {
    let total: f64 = utils.iter().sum();
    let squares: f64 = utils.iter().map(|u| u * u).sum();
    1.0 - (alpha + beta) * total + 0.5 * alpha * beta * (total * total + squares)
}

/// Quadratic test with uniform coefficients (`alpha_i <= alpha`,
/// `beta_i wcet_i <= beta util_i tk`), on the normalized `ck / tk`.
pub fn quadratic_bound_uniform(utils: &[f64], alpha: f64, beta: f64, ck_over_tk: f64) -> Verdict {
    Verdict::compare(
        Condition::QuadraticUniform,
        ck_over_tk,
        uniform_rhs_closed(utils, alpha, beta),
    )
}

fn require_k(k: usize) -> Result<()> {
    if k < 2 {
        Err(Error::NotApplicable(format!(
            "utilization bounds need k >= 2, got {k}"
        )))
    } else {
        Ok(())
    }
}

/// Bound on the higher-priority utilization `Σ_{i<k} U_i` that guarantees
/// the uniform quadratic condition for the given `ck / tk`.
pub fn util_bound_exclusive(k: usize, alpha: f64, beta: f64, ck_over_tk: f64) -> Result<f64> {
    require_k(k)?;
    let kf = k as f64;
    let s = kf / (kf - 1.0);
    let a = alpha + beta;
    let disc = a * a - 2.0 * alpha * beta * (1.0 - ck_over_tk) * s;
    if disc < 0.0 {
        return Err(Error::NotApplicable(format!(
            "negative discriminant {disc:.6} for ck/tk = {ck_over_tk}"
        )));
    }
    Ok((a - disc.sqrt()) / (alpha * beta * s))
}

/// Limit of [`util_bound_exclusive`] as `k` grows.
pub fn util_bound_exclusive_limit(alpha: f64, beta: f64, ck_over_tk: f64) -> f64 {
    (alpha + beta - (alpha * alpha + beta * beta + 2.0 * alpha * beta * ck_over_tk).sqrt())
        / (alpha * beta)
}

fn require_coeff_sum(alpha: f64, beta: f64) -> Result<()> {
    if alpha + beta < 1.0 {
        Err(Error::NotApplicable(format!(
            "needs alpha + beta >= 1, got {}",
            alpha + beta
        )))
    } else {
        Ok(())
    }
}

/// Bound on `ck/tk + Σ_{i<k} U_i` that guarantees the uniform quadratic
/// condition. Requires `alpha + beta >= 1`.
pub fn util_bound_inclusive(k: usize, alpha: f64, beta: f64) -> Result<f64> {
    require_k(k)?;
    require_coeff_sum(alpha, beta)?;
    let kf = k as f64;
    let a = alpha + beta;
    let ab = alpha * beta;
    // Tangent point has ck/tk < 0 exactly when k (alpha^2+beta^2-1) > (alpha+beta)^2 - 1.
    if kf * (alpha * alpha + beta * beta - 1.0) > a * a - 1.0 {
        util_bound_exclusive(k, alpha, beta, 0.0)
    } else {
        Ok(1.0 + (kf - 1.0) * ((a - 1.0) - 0.5 * a * a + 0.5) / (kf * ab))
    }
}

/// Limit of [`util_bound_inclusive`] and [`util_bound_inclusive_beta`] as `k`
/// grows.
pub fn util_bound_inclusive_limit(alpha: f64, beta: f64) -> f64 {
    (alpha + beta - (alpha * alpha + beta * beta).sqrt()) / (alpha * beta)
}

/// Bound on `Σ_{i<=k} U_i` when `ck/tk = beta * U_k`. Requires
/// `alpha + beta >= 1`.
pub fn util_bound_inclusive_beta(k: usize, alpha: f64, beta: f64) -> Result<f64> {
    require_k(k)?;
    require_coeff_sum(alpha, beta)?;
    let kf = k as f64;
    if kf > (2.0 * beta + alpha) / alpha {
        let disc = alpha * alpha + beta * beta - 2.0 * alpha * beta / (kf - 1.0);
        Ok(((kf - 1.0) / kf) * (alpha + beta - disc.sqrt()) / (alpha * beta))
    } else {
        Ok(1.0 / beta - (kf - 1.0) * alpha / (2.0 * kf * beta * beta))
    }
}

/// Safe upper bound on the time needed to finish `ck`:
/// `(ck + sum_b - cross) / (1 - sum_a)`, unbounded once `sum_a >= 1`.
pub fn response_bound_general(inst: &KPointInstance) -> ResponseBound {
    let sum_a = inst.sum_a();
    if sum_a >= 1.0 {
        return ResponseBound::Unbounded;
    }
    ResponseBound::Finite((inst.ck + inst.sum_b() - inst.cross()) / (1.0 - sum_a))
}
