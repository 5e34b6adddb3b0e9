use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::task::TaskSet;

use super::{all_ticks, interference, ticks, Ticks};

/// Fixed-point steps allowed across all jobs of one analysis.
const STEP_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "value")]
pub enum ExactResponse {
    Finite(u64),
    Unbounded,
}

impl ExactResponse {
    pub fn as_f64(self) -> f64 {
        match self {
            ExactResponse::Finite(r) => r as f64,
            ExactResponse::Unbounded => f64::INFINITY,
        }
    }

    pub fn meets(self, deadline: f64) -> bool {
        self.as_f64() <= deadline
    }
}

impl fmt::Display for ExactResponse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactResponse::Finite(r) => write!(f, "{r}"),
            ExactResponse::Unbounded => f.write_str("unbounded"),
        }
    }
}

fn overloaded(tasks: &[Ticks]) -> bool {
    let total: BigRational = tasks
        .iter()
        .map(|x| BigRational::new(BigInt::from(x.c), BigInt::from(x.t)))
        .sum();
    total > BigRational::one()
}

/// Exact worst-case response time on one processor, for any deadlines.
///
/// For `h = 1, 2, ...` finds the least `t` with `h C_k + Σ ceil(t/T_i) C_i <= t`
/// and stops at the first `h` whose finishing time is within `h T_k`.
pub fn busy_window_exact(ts: &TaskSet, index: usize) -> Result<ExactResponse> {
    let task = ticks(ts.task(index)?)?;
    let hp = all_ticks(ts.higher_priority(index)?)?;
    if ts.processors() != 1 {
        return Err(Error::NotApplicable("uniprocessor analysis on a multiprocessor set".into()));
    }
    let mut level: Vec<Ticks> = hp.clone();
    level.push(task);
    if overloaded(&level) {
        return Ok(ExactResponse::Unbounded);
    }
    let mut steps = 0u64;
    let mut worst = 0u64;
    let mut t = hp.iter().map(|x| x.c).sum::<u64>();
    for h in 1u64.. {
        // Finishing times grow with h, so the previous one is a safe start.
        t += task.c;
        loop {
            steps += 1;
            if steps > STEP_BUDGET {
                return Err(Error::Budget(format!(
                    "busy window of task {index} needs more than {STEP_BUDGET} steps"
                )));
            }
            let demand = h * task.c + interference(&hp, t);
            if demand == t {
                break;
            }
            t = demand;
        }
        worst = worst.max(t - (h - 1) * task.t);
        if t <= h * task.t {
            break;
        }
    }
    Ok(ExactResponse::Finite(worst))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::task::Task;

    fn set(tasks: &[(f64, f64, f64)]) -> TaskSet {
        TaskSet::uniprocessor(
            tasks
                .iter()
                .enumerate()
                .map(|(i, &(c, t, d))| Task::new(format!("t{i}"), c, t, d))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn examples() {
        let ts = set(&[(2.0, 4.0, 4.0), (1.0, 3.0, 3.0)]);
        assert_eq!(busy_window_exact(&ts, 1).unwrap(), ExactResponse::Finite(3));
        let ts = set(&[(1.0, 3.0, 3.0), (1.0, 20.0, 20.0), (1.0, 4.0, 8.0)]);
        assert_eq!(busy_window_exact(&ts, 2).unwrap(), ExactResponse::Finite(3));
        let ts = set(&[(5.0, 9.0, 9.0)]);
        assert_eq!(busy_window_exact(&ts, 0).unwrap(), ExactResponse::Finite(5));
    }

    #[test]
    fn later_job_can_be_worst() {
        // With arbitrary deadlines a later job of the busy window can be
        // the worst one.
        let ts = set(&[(26.0, 70.0, 70.0), (62.0, 100.0, 120.0)]);
        let r = busy_window_exact(&ts, 1).unwrap();
        let ExactResponse::Finite(r) = r else { panic!() };
        // Job 5 finishes at 518, released at 400.
        assert_eq!(r, 118);
        assert_eq!(r, reference(&[(26, 70)], (62, 100)));
    }

    /// Unit-step schedule of the whole busy window.
    fn reference(hp: &[(u64, u64)], k: (u64, u64)) -> u64 {
        let mut pending = vec![0u64; hp.len()];
        let mut backlog: std::collections::VecDeque<(u64, u64)> = Default::default();
        let mut worst = 0;
        let mut job = 0u64;
        for now in 0u64.. {
            for (i, &(c, t)) in hp.iter().enumerate() {
                if now % t == 0 {
                    pending[i] += c;
                }
            }
            if now % k.1 == 0 {
                backlog.push_back((now, k.0));
                job += 1;
            }
            if let Some(i) = pending.iter().position(|&p| p > 0) {
                pending[i] -= 1;
            } else if let Some(front) = backlog.front_mut() {
                front.1 -= 1;
                if front.1 == 0 {
                    worst = worst.max(now + 1 - front.0);
                    backlog.pop_front();
                }
            }
            if backlog.is_empty() && pending.iter().all(|&p| p == 0) && job > 0 {
                return worst;
            }
        }
        unreachable!()
    }

    #[test]
    fn matches_unit_step_schedule() {
        let cases: &[(&[(u64, u64)], (u64, u64))] = &[
            (&[(1, 3)], (2, 4)),
            (&[(2, 5), (1, 7)], (2, 6)),
            (&[(3, 10), (4, 15)], (5, 12)),
            (&[(1, 2)], (1, 2)),
        ];
        for &(hp, k) in cases {
            let mut tasks: Vec<(f64, f64, f64)> =
                hp.iter().map(|&(c, t)| (c as f64, t as f64, t as f64)).collect();
            tasks.push((k.0 as f64, k.1 as f64, 1000.0));
            let ts = set(&tasks);
            let ExactResponse::Finite(r) = busy_window_exact(&ts, hp.len()).unwrap() else {
                panic!()
            };
            assert_eq!(r, reference(hp, k), "{hp:?} {k:?}");
        }
    }

    #[test]
    fn overload_is_unbounded() {
        let ts = set(&[(2.0, 3.0, 3.0), (2.0, 4.0, 4.0)]);
        assert_eq!(busy_window_exact(&ts, 1).unwrap(), ExactResponse::Unbounded);
    }
}
