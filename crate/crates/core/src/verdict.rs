use std::fmt;

use serde::Serialize;

/// Absolute slack allowed when comparing normalized (ratio) quantities.
pub const TOLERANCE: f64 = 1e-9;

/// Which closed-form condition (or exact analysis) produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    /// The k-point test evaluated directly at explicit points.
    KpointDirect,
    /// General quadratic bound over per-task coefficients.
    QuadraticGeneral,
    /// Quadratic bound with uniform coefficients.
    QuadraticUniform,
    /// Uniprocessor busy-window test over a `D_k` window with a virtual task.
    WindowArbitrary,
    /// Uniprocessor response-time bound compared against `D_k`.
    ResponseBound,
    /// RM utilization bound on the higher-priority utilization.
    RmUtilExclusive,
    /// RM utilization bound on the total utilization up to `k`.
    RmUtilInclusive,
    /// Global RM quadratic condition.
    GlobalRmQuadratic,
    /// Global RM utilization condition.
    GlobalRmUtil,
    /// Global fixed-priority (DM) quadratic condition.
    GlobalDmQuadratic,
    /// Exact time-demand analysis.
    ExactTda,
    /// Exact busy-window response-time analysis.
    ExactBusyWindow,
}

impl Condition {
    pub fn label(self) -> &'static str {
        match self {
            Condition::KpointDirect => "kpoint-direct",
            Condition::QuadraticGeneral => "quadratic-general",
            Condition::QuadraticUniform => "quadratic-uniform",
            Condition::WindowArbitrary => "window-arbitrary",
            Condition::ResponseBound => "response-bound",
            Condition::RmUtilExclusive => "rm-util-exclusive",
            Condition::RmUtilInclusive => "rm-util-inclusive",
            Condition::GlobalRmQuadratic => "global-rm-quadratic",
            Condition::GlobalRmUtil => "global-rm-util",
            Condition::GlobalDmQuadratic => "global-dm-quadratic",
            Condition::ExactTda => "exact-tda",
            Condition::ExactBusyWindow => "exact-busy-window",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// The condition holds: schedulability is guaranteed.
    Schedulable,
    /// The condition fails. This is not a proof of unschedulability.
    NotProven,
    /// A hypothesis of the condition is violated, so it says nothing.
    NotApplicable,
}

/// Outcome of one sufficient test: `lhs <= bound` decides it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub condition: Condition,
    /// Left-hand side of the condition (normalized where the condition is).
    pub lhs: f64,
    /// Right-hand side of the condition.
    pub bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl Verdict {
    pub fn compare(condition: Condition, lhs: f64, bound: f64) -> Self {
        let status = if lhs <= bound + TOLERANCE {
            Status::Schedulable
        } else {
            Status::NotProven
        };
        Verdict {
            status,
            condition,
            lhs,
            bound,
            reason: None,
        }
    }

    pub fn not_applicable(condition: Condition, reason: impl Into<String>) -> Self {
        Verdict {
            status: Status::NotApplicable,
            condition,
            lhs: f64::NAN,
            bound: f64::NAN,
            reason: Some(reason.into()),
        }
    }

    pub fn is_schedulable(&self) -> bool {
        self.status == Status::Schedulable
    }

    pub fn is_applicable(&self) -> bool {
        self.status != Status::NotApplicable
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.status {
            Status::Schedulable => write!(
                f,
                "{}: schedulable ({:.6} <= {:.6})",
                self.condition, self.lhs, self.bound
            ),
            Status::NotProven => write!(
                f,
                "{}: not proven ({:.6} > {:.6})",
                self.condition, self.lhs, self.bound
            ),
            Status::NotApplicable => write!(
                f,
                "{}: not applicable ({})",
                self.condition,
                self.reason.as_deref().unwrap_or("precondition violated")
            ),
        }
    }
}

/// A safe upper bound on a worst-case response time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "value")]
pub enum ResponseBound {
    Finite(f64),
    Unbounded,
}

impl ResponseBound {
    pub fn value(self) -> Option<f64> {
        match self {
            ResponseBound::Finite(v) => Some(v),
            ResponseBound::Unbounded => None,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, ResponseBound::Unbounded)
    }

    /// `f64::INFINITY` for the unbounded case.
    pub fn as_f64(self) -> f64 {
        self.value().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for ResponseBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResponseBound::Finite(v) => write!(f, "{v:.6}"),
            ResponseBound::Unbounded => f.write_str("unbounded"),
        }
    }
}
