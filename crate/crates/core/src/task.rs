//! Sporadic tasks, task sets, priority assignment and the split of the
//! higher-priority tasks around the deadline of the task under analysis.
//!
//! Tasks are kept in priority order: index 0 is the highest priority and the
//! task under analysis is addressed by its index. Everything before it is its
//! higher-priority set.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One sporadic task: worst-case execution time, minimum inter-arrival time
/// and relative deadline, all in the same time unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: String,
    #[serde(rename = "C")]
    pub wcet: f64,
    #[serde(rename = "T")]
    pub period: f64,
    #[serde(rename = "D")]
    pub deadline: f64,
}

impl Task {
    pub fn new(id: impl Into<String>, wcet: f64, period: f64, deadline: f64) -> Self {
        Task {
            id: id.into(),
            wcet,
            period,
            deadline,
        }
    }

    /// Implicit-deadline shorthand (`D = T`).
    pub fn implicit(id: impl Into<String>, wcet: f64, period: f64) -> Self {
        Task::new(id, wcet, period, period)
    }

    pub fn utilization(&self) -> f64 {
        self.wcet / self.period
    }

    /// `C / D`.
    pub fn density(&self) -> f64 {
        self.wcet / self.deadline
    }

    fn validate(&self) -> Result<()> {
        for (field, value) in [
            ("C", self.wcet),
            ("T", self.period),
            ("D", self.deadline),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::NonPositive {
                    id: self.id.clone(),
                    field,
                    value,
                });
            }
        }
        let util = self.utilization();
        if util > 1.0 {
            return Err(Error::Overutilized {
                id: self.id.clone(),
                util,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeadlineModel {
    /// `D_i = T_i` for every task.
    Implicit,
    /// `D_i <= T_i` for every task, at least one strict.
    Constrained,
    Arbitrary,
}

impl DeadlineModel {
    fn classify(tasks: &[Task]) -> Self {
        if tasks.iter().all(|t| t.deadline == t.period) {
            DeadlineModel::Implicit
        } else if tasks.iter().all(|t| t.deadline <= t.period) {
            DeadlineModel::Constrained
        } else {
            DeadlineModel::Arbitrary
        }
    }

    /// Implicit sets are also constrained.
    pub fn is_constrained(self) -> bool {
        !matches!(self, DeadlineModel::Arbitrary)
    }
}

impl fmt::Display for DeadlineModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeadlineModel::Implicit => "implicit",
            DeadlineModel::Constrained => "constrained",
            DeadlineModel::Arbitrary => "arbitrary",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorityPolicy {
    /// Rate monotonic: shorter period, higher priority.
    Rm,
    /// Deadline monotonic: shorter relative deadline, higher priority.
    Dm,
    /// Keep the order the tasks were given in.
    Given,
}

impl std::str::FromStr for PriorityPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rm" => Ok(PriorityPolicy::Rm),
            "dm" => Ok(PriorityPolicy::Dm),
            "given" => Ok(PriorityPolicy::Given),
            other => Err(Error::Parse(format!("unknown priority policy `{other}`"))),
        }
    }
}

/// A validated task set in priority order, on `processors` identical
/// processors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskSet {
    tasks: Vec<Task>,
    processors: usize,
    model: DeadlineModel,
}

impl TaskSet {
    pub fn new(tasks: Vec<Task>, processors: usize) -> Result<Self> {
        if tasks.is_empty() {
            return Err(Error::EmptyTaskSet);
        }
        if processors == 0 {
            return Err(Error::NoProcessors);
        }
        for t in &tasks {
            t.validate()?;
        }
        let model = DeadlineModel::classify(&tasks);
        Ok(TaskSet {
            tasks,
            processors,
            model,
        })
    }

    pub fn uniprocessor(tasks: Vec<Task>) -> Result<Self> {
        TaskSet::new(tasks, 1)
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn processors(&self) -> usize {
        self.processors
    }

    pub fn model(&self) -> DeadlineModel {
        self.model
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn task(&self, index: usize) -> Result<&Task> {
        self.tasks.get(index).ok_or(Error::IndexOutOfRange {
            index,
            len: self.tasks.len(),
        })
    }

    /// Tasks with higher priority than the one at `index`.
    pub fn higher_priority(&self, index: usize) -> Result<&[Task]> {
        self.task(index)?;
        Ok(&self.tasks[..index])
    }

    pub fn total_utilization(&self) -> f64 {
        self.tasks.iter().map(Task::utilization).sum()
    }

    /// Same tasks, every time parameter multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let tasks = self
            .tasks
            .iter()
            .map(|t| Task::new(t.id.clone(), t.wcet * factor, t.period * factor, t.deadline * factor))
            .collect();
        TaskSet::new(tasks, self.processors)
    }

    pub fn to_json(&self) -> String {
        let doc = TaskSetDoc {
            processors: Some(self.processors),
            tasks: self
                .tasks
                .iter()
                .map(|t| TaskDoc {
                    id: Some(t.id.clone()),
                    wcet: t.wcet,
                    period: t.period,
                    deadline: Some(t.deadline),
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("task set serializes")
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TaskDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    #[serde(rename = "C")]
    wcet: f64,
    #[serde(rename = "T")]
    period: f64,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    deadline: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TaskSetDoc {
    #[serde(alias = "M", default)]
    processors: Option<usize>,
    tasks: Vec<TaskDoc>,
}

/// Parses the JSON task-set document
/// `{"processors": M, "tasks": [{"id": .., "C": .., "T": .., "D": ..}]}`.
///
/// `processors` may also be spelled `M` and defaults to 1; a missing `D`
/// means an implicit deadline and a missing `id` becomes `tau<n>` (1-based).
pub fn parse_taskset(document: &str) -> Result<TaskSet> {
    let doc: TaskSetDoc =
        serde_json::from_str(document).map_err(|e| Error::Parse(e.to_string()))?;
    let tasks = doc
        .tasks
        .into_iter()
        .enumerate()
        .map(|(i, t)| Task {
            id: t.id.unwrap_or_else(|| format!("tau{}", i + 1)),
            wcet: t.wcet,
            period: t.period,
            deadline: t.deadline.unwrap_or(t.period),
        })
        .collect();
    TaskSet::new(tasks, doc.processors.unwrap_or(1))
}

/// Reorders the tasks by `policy`. Sorting is stable, so ties keep their
/// original relative order.
pub fn assign_priorities(ts: &TaskSet, policy: PriorityPolicy) -> TaskSet {
    let mut tasks = ts.tasks.clone();
    match policy {
        PriorityPolicy::Rm => tasks.sort_by(|a, b| a.period.total_cmp(&b.period)),
        PriorityPolicy::Dm => tasks.sort_by(|a, b| a.deadline.total_cmp(&b.deadline)),
        PriorityPolicy::Given => {}
    }
    TaskSet {
        tasks,
        processors: ts.processors,
        model: ts.model,
    }
}

/// Splits the higher-priority tasks of task `index` into those with a period
/// shorter than its deadline (`hp1`) and the rest (`hp2`). Both keep priority
/// order.
pub fn partition_hp(ts: &TaskSet, index: usize) -> Result<(Vec<Task>, Vec<Task>)> {
    let dk = ts.task(index)?.deadline;
    let (hp1, hp2) = ts.tasks[..index]
        .iter()
        .cloned()
        .partition(|t| t.period < dk);
    Ok((hp1, hp2))
}
