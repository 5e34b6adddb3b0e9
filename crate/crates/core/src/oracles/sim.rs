//! Event-driven global preemptive fixed-priority simulation on integer
//! ticks, synchronous release, strictly periodic arrivals.
//!
//! Priority is the task index (lower wins). Jobs of one task run in release
//! order, and a job that misses its deadline keeps running until it is done.

use std::collections::VecDeque;
use std::io::{self, Write};

use num_integer::Integer;
use serde::Serialize;

use crate::error::Result;
use crate::task::TaskSet;

use super::{all_ticks, Ticks};

pub const DEFAULT_HORIZON_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    /// The horizon is the hyperperiod, cut to this many ticks.
    pub horizon_cap: u64,
    /// Keep every event; when false only misses are kept.
    pub record_events: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            horizon_cap: DEFAULT_HORIZON_CAP,
            record_events: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Release,
    Start,
    Preempt,
    Finish,
    Miss,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimEvent {
    pub time: u64,
    pub kind: EventKind,
    /// Task index in priority order.
    pub task: usize,
    pub id: String,
    /// 0-based job number within the task.
    pub job: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimTrace {
    pub events: Vec<SimEvent>,
    pub misses: Vec<SimEvent>,
    pub horizon: u64,
    pub hyperperiod: Option<u64>,
    /// The hyperperiod was longer than the cap: a miss-free run proves
    /// nothing beyond the horizon.
    pub capped: bool,
}

impl SimTrace {
    pub fn has_miss(&self) -> bool {
        !self.misses.is_empty()
    }

    /// One JSON object per event.
    pub fn write_json_lines<W: Write>(&self, mut out: W) -> io::Result<()> {
        for e in &self.events {
            serde_json::to_writer(&mut out, e)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

#[derive(Debug)]
struct Job {
    number: u64,
    deadline: u64,
    remaining: u64,
    started: bool,
}

fn hyperperiod(tasks: &[Ticks]) -> Option<u64> {
    tasks
        .iter()
        .try_fold(1u64, |acc, x| acc.checked_mul(x.t / acc.gcd(&x.t)))
}

pub fn simulate_global_fp(ts: &TaskSet, cfg: &SimConfig) -> Result<SimTrace> {
    let tasks = all_ticks(ts.tasks())?;
    let m = ts.processors();
    let hyper = hyperperiod(&tasks);
    let horizon = hyper.map_or(cfg.horizon_cap, |h| h.min(cfg.horizon_cap));
    let capped = hyper.map_or(true, |h| h > cfg.horizon_cap);

    let mut trace = SimTrace {
        events: Vec::new(),
        misses: Vec::new(),
        horizon,
        hyperperiod: hyper,
        capped,
    };
    let emit = |trace: &mut SimTrace, time, kind, task: usize, job| {
        let event = SimEvent {
            time,
            kind,
            task,
            id: ts.tasks()[task].id.clone(),
            job,
        };
        if kind == EventKind::Miss {
            trace.misses.push(event.clone());
        }
        if cfg.record_events {
            trace.events.push(event);
        }
    };

    let n = tasks.len();
    let mut queues: Vec<VecDeque<Job>> = (0..n).map(|_| VecDeque::new()).collect();
    let mut next_release = vec![0u64; n];
    let mut released = vec![0u64; n];
    let mut running: Vec<usize> = Vec::new();
    let mut now = 0u64;

    while now < horizon {
        // Completions and misses due at `now`, then arrivals.
        for &i in &running {
            if queues[i].front().is_some_and(|j| j.remaining == 0) {
                let job = queues[i].pop_front().unwrap();
                emit(&mut trace, now, EventKind::Finish, i, job.number);
            }
        }
        running.retain(|&i| queues[i].front().is_some_and(|j| j.started));
        for (i, q) in queues.iter().enumerate() {
            for job in q.iter().filter(|j| j.deadline == now) {
                emit(&mut trace, now, EventKind::Miss, i, job.number);
            }
        }
        for i in 0..n {
            if next_release[i] == now {
                let number = released[i];
                released[i] += 1;
                queues[i].push_back(Job {
                    number,
                    deadline: now + tasks[i].d,
                    remaining: tasks[i].c,
                    started: false,
                });
                next_release[i] += tasks[i].t;
                emit(&mut trace, now, EventKind::Release, i, number);
            }
        }

        let chosen: Vec<usize> = (0..n).filter(|&i| !queues[i].is_empty()).take(m).collect();
        for &i in &running {
            if !chosen.contains(&i) {
                let number = queues[i].front().unwrap().number;
                emit(&mut trace, now, EventKind::Preempt, i, number);
            }
        }
        for &i in &chosen {
            if !running.contains(&i) {
                let job = queues[i].front_mut().unwrap();
                job.started = true;
                let number = job.number;
                emit(&mut trace, now, EventKind::Start, i, number);
            }
        }
        running = chosen;

        let mut next = horizon;
        next = next.min(*next_release.iter().min().unwrap_or(&horizon));
        for &i in &running {
            next = next.min(now + queues[i].front().unwrap().remaining);
        }
        for q in &queues {
            for job in q {
                if job.deadline > now {
                    next = next.min(job.deadline);
                }
            }
        }
        for &i in &running {
            queues[i].front_mut().unwrap().remaining -= next - now;
        }
        now = next;
    }

    // Work finishing exactly at the horizon, and deadlines on it.
    for &i in &running {
        if queues[i].front().is_some_and(|j| j.remaining == 0) {
            let job = queues[i].pop_front().unwrap();
            emit(&mut trace, now, EventKind::Finish, i, job.number);
        }
    }
    for (i, q) in queues.iter().enumerate() {
        for job in q.iter().filter(|j| j.deadline == now) {
            emit(&mut trace, now, EventKind::Miss, i, job.number);
        }
    }
    Ok(trace)
}
