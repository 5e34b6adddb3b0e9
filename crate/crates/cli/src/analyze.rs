use std::fmt::Write;

use serde::Serialize;

use k2q::oracles::{
    busy_window_exact, simulate_global_fp, tda_exact, ExactResponse, SimConfig, SimEvent,
};
use k2q::task::DeadlineModel;
use k2q::uniproc::{bini_bound, wcrt_bound};
use k2q::{Error, ResponseBound, TaskSet, Verdict};

use crate::selection::TestKind;
use crate::CliError;

#[derive(Debug, Serialize)]
pub struct Report {
    pub processors: usize,
    pub model: DeadlineModel,
    pub tasks: Vec<TaskReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimSummary>,
}

#[derive(Debug, Serialize)]
pub struct TaskReport {
    pub index: usize,
    pub id: String,
    #[serde(rename = "C")]
    pub wcet: f64,
    #[serde(rename = "T")]
    pub period: f64,
    #[serde(rename = "D")]
    pub deadline: f64,
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub response: Option<ResponseReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactReport>,
}

#[derive(Debug, Serialize)]
pub struct ResponseReport {
    /// `None` when the utilization up to the task exceeds 1.
    pub bound: Option<ResponseBound>,
    pub utilization_based: ResponseBound,
}

#[derive(Debug, Serialize)]
pub struct ExactReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tda: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wcrt: Option<ExactResponse>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct SimSummary {
    pub outcome: SimOutcome,
    pub horizon: u64,
    pub capped: bool,
    pub misses: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_miss: Option<SimEvent>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimOutcome {
    /// A deadline was missed: the set is not schedulable.
    Miss,
    /// No miss over a full hyperperiod from synchronous release.
    NoMiss,
    /// No miss, but the horizon was cut short.
    Inconclusive,
    /// Parameters are not integers.
    Skipped,
}

fn exact_report(ts: &TaskSet, index: usize) -> Result<ExactReport, CliError> {
    let constrained = ts.tasks()[index].deadline <= ts.tasks()[index].period;
    let tda = if constrained {
        match tda_exact(ts, index) {
            Ok(v) => Some(v),
            Err(Error::NotExact { .. }) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };
    match busy_window_exact(ts, index) {
        Ok(r) => Ok(ExactReport {
            tda,
            wcrt: Some(r),
            note: None,
        }),
        Err(Error::NotExact { .. }) => Ok(ExactReport {
            tda: None,
            wcrt: None,
            note: Some("exact analysis needs integer parameters".into()),
        }),
        Err(Error::Budget(msg)) => Ok(ExactReport {
            tda,
            wcrt: None,
            note: Some(msg),
        }),
        Err(e) => Err(e.into()),
    }
}

fn simulate(ts: &TaskSet, horizon_cap: u64) -> Result<SimSummary, CliError> {
    let cfg = SimConfig {
        horizon_cap,
        record_events: false,
    };
    match simulate_global_fp(ts, &cfg) {
        Ok(trace) => Ok(SimSummary {
            outcome: if trace.has_miss() {
                SimOutcome::Miss
            } else if trace.capped {
                SimOutcome::Inconclusive
            } else {
                SimOutcome::NoMiss
            },
            horizon: trace.horizon,
            capped: trace.capped,
            misses: trace.misses.len(),
            first_miss: trace.misses.first().cloned(),
            note: None,
        }),
        Err(Error::NotExact { .. }) => Ok(SimSummary {
            outcome: SimOutcome::Skipped,
            horizon: 0,
            capped: false,
            misses: 0,
            first_miss: None,
            note: Some("simulation needs integer parameters".into()),
        }),
        Err(e) => Err(e.into()),
    }
}

/// Runs every selected test on every task. Uniprocessor sets also get the
/// response bounds and exact analyses; multiprocessor sets get a simulation.
pub fn analyze(ts: &TaskSet, tests: &[TestKind], horizon_cap: u64) -> Result<Report, CliError> {
    let uni = ts.processors() == 1;
    let mut tasks = Vec::with_capacity(ts.len());
    for (index, task) in ts.tasks().iter().enumerate() {
        let verdicts = tests
            .iter()
            .filter(|t| **t != TestKind::Exact && (uni || !t.uniprocessor_only()))
            .map(|t| t.evaluate(ts, index))
            .collect::<Result<Vec<_>, _>>()?;
        let (response, exact) = if uni {
            let bound = match wcrt_bound(ts, index) {
                Ok(b) => Some(b),
                Err(Error::NotApplicable(_)) => None,
                Err(e) => return Err(e.into()),
            };
            let response = ResponseReport {
                bound,
                utilization_based: bini_bound(ts, index)?,
            };
            (Some(response), Some(exact_report(ts, index)?))
        } else {
            (None, None)
        };
        tasks.push(TaskReport {
            index,
            id: task.id.clone(),
            wcet: task.wcet,
            period: task.period,
            deadline: task.deadline,
            verdicts,
            response,
            exact,
        });
    }
    let simulation = if uni {
        None
    } else {
        Some(simulate(ts, horizon_cap)?)
    };
    Ok(Report {
        processors: ts.processors(),
        model: ts.model(),
        tasks,
        simulation,
    })
}

pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} tasks on {} processor{}, {} deadlines",
        report.tasks.len(),
        report.processors,
        if report.processors == 1 { "" } else { "s" },
        report.model
    );
    for t in &report.tasks {
        let _ = writeln!(out);
        let _ = writeln!(out, "[{}] {}  C={} T={} D={}", t.index, t.id, t.wcet, t.period, t.deadline);
        for v in &t.verdicts {
            let _ = writeln!(out, "  {v}");
        }
        if let Some(r) = &t.response {
            let bound = r
                .bound
                .map_or_else(|| "not applicable".to_owned(), |b| b.to_string());
            let _ = writeln!(
                out,
                "  response bound: {bound} (utilization-based: {})",
                r.utilization_based
            );
        }
        if let Some(e) = &t.exact {
            if let Some(v) = &e.tda {
                let _ = writeln!(out, "  {v}");
            }
            if let Some(r) = e.wcrt {
                let meets = if r.meets(t.deadline) { "meets" } else { "misses" };
                let _ = writeln!(out, "  exact WCRT: {r} ({meets} D)");
            }
            if let Some(note) = &e.note {
                let _ = writeln!(out, "  exact analysis skipped: {note}");
            }
        }
    }
    if let Some(s) = &report.simulation {
        let _ = writeln!(out);
        let _ = match s.outcome {
            SimOutcome::Skipped => writeln!(
                out,
                "simulation skipped: {}",
                s.note.as_deref().unwrap_or("")
            ),
            SimOutcome::Miss => {
                let m = s.first_miss.as_ref().expect("miss recorded");
                writeln!(
                    out,
                    "simulation: {} deadline misses within {} ticks, first: {} job {} at {}",
                    s.misses, s.horizon, m.id, m.job, m.time
                )
            }
            SimOutcome::NoMiss => {
                writeln!(out, "simulation: no miss over the hyperperiod ({} ticks)", s.horizon)
            }
            SimOutcome::Inconclusive => writeln!(
                out,
                "simulation: no miss within {} ticks; inconclusive (hyperperiod above the cap)",
                s.horizon
            ),
        };
    }
    out
}
