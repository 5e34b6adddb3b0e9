use std::fmt;
use std::str::FromStr;

use k2q::multiproc::{gdm_quadratic_test, grm_quadratic_test, grm_util_test};
use k2q::oracles::busy_window_exact;
use k2q::uniproc::{response_sched_test, rm_util_bounds, test_arbitrary_window};
use k2q::{Condition, Result, TaskSet, Verdict};

use crate::CliError;

/// A test that can be selected with `--tests`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TestKind {
    Window,
    Response,
    RmUtil,
    GrmQuadratic,
    GrmUtil,
    GdmQuadratic,
    /// Exact busy-window analysis; integer parameters only.
    Exact,
}

impl TestKind {
    pub const ALL: [TestKind; 7] = [
        TestKind::Window,
        TestKind::Response,
        TestKind::RmUtil,
        TestKind::GrmQuadratic,
        TestKind::GrmUtil,
        TestKind::GdmQuadratic,
        TestKind::Exact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestKind::Window => "window",
            TestKind::Response => "response",
            TestKind::RmUtil => "rm-util",
            TestKind::GrmQuadratic => "grm-quadratic",
            TestKind::GrmUtil => "grm-util",
            TestKind::GdmQuadratic => "gdm-quadratic",
            TestKind::Exact => "exact",
        }
    }

    pub fn uniprocessor_only(self) -> bool {
        matches!(
            self,
            TestKind::Window | TestKind::Response | TestKind::RmUtil | TestKind::Exact
        )
    }

    /// Verdict of the test for the task at `index`.
    pub fn evaluate(self, ts: &TaskSet, index: usize) -> Result<Verdict> {
        match self {
            TestKind::Window => test_arbitrary_window(ts, index),
            TestKind::Response => response_sched_test(ts, index),
            TestKind::RmUtil => rm_util_bounds(ts, index).map(|b| b.verdict),
            TestKind::GrmQuadratic => grm_quadratic_test(ts, index),
            TestKind::GrmUtil => grm_util_test(ts, index),
            TestKind::GdmQuadratic => gdm_quadratic_test(ts, index),
            TestKind::Exact => {
                let deadline = ts.task(index)?.deadline;
                let r = busy_window_exact(ts, index)?;
                Ok(Verdict::compare(Condition::ExactBusyWindow, r.as_f64(), deadline))
            }
        }
    }

    /// Whether every task of the set passes.
    pub fn accepts(self, ts: &TaskSet) -> Result<bool> {
        for k in 0..ts.len() {
            if !self.evaluate(ts, k)?.is_schedulable() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestKind {
    type Err = CliError;

    fn from_str(s: &str) -> std::result::Result<Self, CliError> {
        TestKind::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| CliError::Input(format!("unknown test `{s}`")))
    }
}

/// Parses a comma-separated test list; `all` (or nothing) picks every
/// sufficient test that fits the processor count.
pub fn parse_tests(spec: Option<&str>, processors: usize) -> std::result::Result<Vec<TestKind>, CliError> {
    let defaults = || {
        TestKind::ALL
            .into_iter()
            .filter(|t| *t != TestKind::Exact && (processors == 1 || !t.uniprocessor_only()))
            .collect()
    };
    match spec.map(str::trim) {
        None | Some("all") | Some("") => Ok(defaults()),
        Some(list) => {
            let mut tests = list
                .split(',')
                .map(|s| s.trim().parse())
                .collect::<std::result::Result<Vec<TestKind>, _>>()?;
            tests.sort();
            tests.dedup();
            Ok(tests)
        }
    }
}
