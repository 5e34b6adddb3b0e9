//! Random task sets: UUniFast-discard utilizations, log-uniform periods and
//! uniformly drawn deadline ratios.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::task::{assign_priorities, PriorityPolicy, Task, TaskSet};

const MAX_ATTEMPTS: usize = 1000;
const PERIOD_RETRIES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenConfig {
    pub n: usize,
    pub total_util: f64,
    /// `[min, max]`, sampled log-uniformly.
    #[serde(default = "default_periods")]
    pub period_range: (f64, f64),
    /// `[min, max]` multiplier of the period, sampled uniformly.
    #[serde(default = "default_ratios")]
    pub deadline_ratio_range: (f64, f64),
    #[serde(default = "default_processors")]
    pub processors: usize,
    #[serde(default)]
    pub integer_mode: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_policy")]
    pub policy: PriorityPolicy,
}

fn default_periods() -> (f64, f64) {
    (1.0, 1000.0)
}

fn default_ratios() -> (f64, f64) {
    (1.0, 1.0)
}

fn default_processors() -> usize {
    1
}

fn default_policy() -> PriorityPolicy {
    PriorityPolicy::Rm
}

impl GenConfig {
    pub fn new(n: usize, total_util: f64) -> Self {
        GenConfig {
            n,
            total_util,
            period_range: default_periods(),
            deadline_ratio_range: default_ratios(),
            processors: default_processors(),
            integer_mode: false,
            seed: 0,
            policy: default_policy(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.processors == 0 {
            return bad("processors must be at least 1".into());
        }
        if !(self.total_util > 0.0 && self.total_util <= self.processors as f64) {
            return bad(format!("total_util {} outside (0, M]", self.total_util));
        }
        if self.total_util > self.n as f64 {
            return bad(format!("total_util {} exceeds n = {}", self.total_util, self.n));
        }
        let (pmin, pmax) = self.period_range;
        if !(pmin > 0.0 && pmin <= pmax && pmax.is_finite()) {
            return bad(format!("bad period range [{pmin}, {pmax}]"));
        }
        if self.integer_mode && pmax < 1.0 {
            return bad("integer mode needs periods of at least 1".into());
        }
        let (dmin, dmax) = self.deadline_ratio_range;
        if !(dmin > 0.0 && dmin <= dmax && dmax.is_finite()) {
            return bad(format!("bad deadline ratio range [{dmin}, {dmax}]"));
        }
        Ok(())
    }
}

/// Generator stream for one trial; trials of one seed never overlap.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// UUniFast: `n` utilizations summing to `total`, uniformly over the simplex.
/// Draws with a value above 1 are discarded and redrawn.
pub fn uunifast_rng<R: Rng>(n: usize, total: f64, rng: &mut R) -> Result<Vec<f64>> {
    if n == 0 || !(total > 0.0) {
        return Err(Error::Config(format!("need n >= 1 and total > 0, got {n}, {total}")));
    }
    if total > n as f64 {
        return Err(Error::Config(format!("total {total} exceeds n = {n}")));
    }
    for _ in 0..MAX_ATTEMPTS {
        let mut utils = Vec::with_capacity(n);
        let mut rest = total;
        for i in 1..n {
            let next = rest * rng.gen::<f64>().powf(1.0 / (n - i) as f64);
            utils.push(rest - next);
            rest = next;
        }
        utils.push(rest);
        if utils.iter().all(|&u| u > 0.0 && u <= 1.0) {
            return Ok(utils);
        }
    }
    Err(Error::GenerationFailed(MAX_ATTEMPTS))
}

pub fn uunifast(n: usize, total: f64, seed: u64) -> Result<Vec<f64>> {
    uunifast_rng(n, total, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn log_uniform<R: Rng>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        (rng.gen_range(lo.ln()..=hi.ln())).exp()
    }
}

fn uniform<R: Rng>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

fn draw_task<R: Rng>(cfg: &GenConfig, rng: &mut R, i: usize, util: f64) -> Option<Task> {
    let id = format!("tau{}", i + 1);
    if !cfg.integer_mode {
        let period = log_uniform(rng, cfg.period_range);
        let ratio = uniform(rng, cfg.deadline_ratio_range);
        return Some(Task::new(id, util * period, period, ratio * period));
    }
    for _ in 0..PERIOD_RETRIES {
        let period = log_uniform(rng, cfg.period_range).round().max(1.0);
        let wcet = (util * period).floor();
        if wcet >= 1.0 {
            let ratio = uniform(rng, cfg.deadline_ratio_range);
            let deadline = (ratio * period).round().max(1.0);
            return Some(Task::new(id, wcet, period, deadline));
        }
    }
    None
}

/// Draws one task set from `rng`.
pub fn gen_taskset_rng<R: Rng>(cfg: &GenConfig, rng: &mut R) -> Result<TaskSet> {
    cfg.validate()?;
    'attempt: for _ in 0..MAX_ATTEMPTS {
        let utils = uunifast_rng(cfg.n, cfg.total_util, rng)?;
        let mut tasks = Vec::with_capacity(cfg.n);
        for (i, &u) in utils.iter().enumerate() {
            match draw_task(cfg, rng, i, u) {
                Some(t) => tasks.push(t),
                None => continue 'attempt,
            }
        }
        let ts = TaskSet::new(tasks, cfg.processors)?;
        return Ok(assign_priorities(&ts, cfg.policy));
    }
    Err(Error::GenerationFailed(MAX_ATTEMPTS))
}

/// The task set of trial 0 of `cfg.seed`.
pub fn gen_taskset(cfg: &GenConfig) -> Result<TaskSet> {
    gen_taskset_rng(cfg, &mut trial_rng(cfg.seed, 0))
}

/// The task set of trial `trial` of `cfg.seed`.
pub fn gen_taskset_trial(cfg: &GenConfig, trial: u64) -> Result<TaskSet> {
    gen_taskset_rng(cfg, &mut trial_rng(cfg.seed, trial))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::task::DeadlineModel;

    #[test]
    fn uunifast_examples() {
        assert_eq!(uunifast(1, 0.7, 3).unwrap(), vec![0.7]);
        let u = uunifast(4, 2.0, 11).unwrap();
        assert_eq!(u.len(), 4);
        assert!((u.iter().sum::<f64>() - 2.0).abs() < 1e-12);
        assert!(u.iter().all(|&x| x > 0.0 && x <= 1.0));
        assert_eq!(uunifast(6, 1.3, 99).unwrap(), uunifast(6, 1.3, 99).unwrap());
        assert!(uunifast(2, 2.5, 1).is_err());
        assert!(uunifast(0, 0.5, 1).is_err());
    }

    #[test]
    fn implicit_when_ratio_is_one() {
        let cfg = GenConfig::new(5, 0.8);
        let ts = gen_taskset(&cfg).unwrap();
        assert_eq!(ts.model(), DeadlineModel::Implicit);
        assert!((ts.total_utilization() - 0.8).abs() < 1e-9);
        let periods: Vec<f64> = ts.tasks().iter().map(|t| t.period).collect();
        assert!(periods.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn integer_mode() {
        let cfg = GenConfig {
            integer_mode: true,
            deadline_ratio_range: (0.5, 2.0),
            period_range: (10.0, 1000.0),
            seed: 5,
            policy: PriorityPolicy::Dm,
            ..GenConfig::new(8, 0.9)
        };
        for trial in 0..50 {
            let ts = gen_taskset_trial(&cfg, trial).unwrap();
            for t in ts.tasks() {
                assert_eq!(t.wcet.fract(), 0.0);
                assert_eq!(t.period.fract(), 0.0);
                assert_eq!(t.deadline.fract(), 0.0);
                assert!(t.wcet >= 1.0);
            }
            assert!(ts.total_utilization() <= 0.9 + 1e-12);
        }
    }

    #[test]
    fn multiprocessor_and_json() {
        let cfg: GenConfig =
            serde_json::from_str(r#"{"n": 6, "total_util": 2.5, "processors": 4, "seed": 7}"#)
                .unwrap();
        let ts = gen_taskset(&cfg).unwrap();
        assert_eq!(ts.processors(), 4);
        assert_eq!(ts.len(), 6);
        assert!(GenConfig::new(3, 1.5).validate().is_err());
    }

    #[test]
    fn trials_are_independent_and_reproducible() {
        let cfg = GenConfig::new(4, 0.5);
        assert_eq!(gen_taskset_trial(&cfg, 3).unwrap(), gen_taskset_trial(&cfg, 3).unwrap());
        assert_ne!(gen_taskset_trial(&cfg, 3).unwrap(), gen_taskset_trial(&cfg, 4).unwrap());
    }
}
