//! Verification suites runnable from the command line. Each suite draws its
//! own inputs from `seed` and reports every violation with the offending
//! input as JSON.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use k2q::k2q::{
    quadratic_bound_uniform, quadratic_rhs, response_bound_general, util_bound_exclusive,
    util_bound_exclusive_limit, util_bound_inclusive, worst_case_ordering_response,
    worst_case_ordering_sched, KPointEntry, KPointInstance,
};
use k2q::multiproc::{
    gdm_quadratic_test, gdm_speedup_witness, grm_capacity_factor, grm_quadratic_test,
    grm_util_bound_limit, grm_util_test,
};
use k2q::oracles::{busy_window_exact, lp_min_ck, permutation_minmax, simulate_global_fp, Objective, SimConfig};
use k2q::uniproc::{bini_bound, response_sched_test, rm_util_bounds, test_arbitrary_window, wcrt_bound};
use k2q::workload::{gen_taskset_rng, trial_rng, uunifast_rng, GenConfig};
use k2q::{PriorityPolicy, Status, Task, TaskSet};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Constants,
    Safety,
    Response,
    Lp,
    Ordering,
    Falsification,
    Dominance,
    Pigeonhole,
    Implication,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Constants,
        Suite::Safety,
        Suite::Response,
        Suite::Lp,
        Suite::Ordering,
        Suite::Falsification,
        Suite::Dominance,
        Suite::Pigeonhole,
        Suite::Implication,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Constants => "constants",
            Suite::Safety => "safety",
            Suite::Response => "response",
            Suite::Lp => "lp",
            Suite::Ordering => "ordering",
            Suite::Falsification => "falsification",
            Suite::Dominance => "dominance",
            Suite::Pigeonhole => "pigeonhole",
            Suite::Implication => "implication",
        }
    }

    /// Number of cases drawn when `--count` is not given.
    pub fn default_count(self) -> u64 {
        match self {
            Suite::Constants => 1,
            Suite::Safety | Suite::Response | Suite::Dominance | Suite::Pigeonhole => 10_000,
            Suite::Lp | Suite::Falsification | Suite::Implication => 1000,
            Suite::Ordering => 500,
        }
    }

    pub fn run(self, seed: u64, count: Option<u64>) -> SuiteReport {
        let count = count.unwrap_or_else(|| self.default_count());
        let mut report = SuiteReport::new(self.name());
        match self {
            Suite::Constants => constants(&mut report),
            Suite::Safety => safety(&mut report, seed, count),
            Suite::Response => response(&mut report, seed, count),
            Suite::Lp => lp(&mut report, seed, count),
            Suite::Ordering => ordering(&mut report, seed, count),
            Suite::Falsification => falsification(&mut report, seed, count),
            Suite::Dominance => dominance(&mut report, count),
            Suite::Pigeonhole => pigeonhole(&mut report, seed, count),
            Suite::Implication => implication(&mut report, seed, count),
        }
        report
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Suite::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| CliError::Input(format!("unknown suite `{s}`")))
    }
}

/// `all` or a comma-separated list of suite names.
pub fn parse_suites(spec: &str) -> Result<Vec<Suite>, CliError> {
    if spec.trim() == "all" {
        return Ok(Suite::ALL.to_vec());
    }
    spec.split(',').map(|s| s.trim().parse()).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub checked: u64,
    pub summary: String,
    /// Offending inputs, verbatim.
    pub counterexamples: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &'static str) -> Self {
        SuiteReport { suite, checked: 0, summary: String::new(), counterexamples: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    fn fail(&mut self, what: impl fmt::Display, input: impl fmt::Display) {
        self.counterexamples.push(format!("{what}: {input}"));
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(f, "{status} {} ({} checked): {}", self.suite, self.checked, self.summary)?;
        for c in &self.counterexamples {
            writeln!(f, "  counterexample {c}")?;
        }
        Ok(())
    }
}

/// Runs the suites in order; any violation turns into a verification error
/// after all suites have been reported.
pub fn verify(suites: &[Suite], seed: u64, count: Option<u64>) -> (Vec<SuiteReport>, Result<(), CliError>) {
    let reports: Vec<SuiteReport> = suites.iter().map(|s| s.run(seed, count)).collect();
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.suite).collect();
    let outcome = if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(format!("suites with violations: {}", failed.join(", "))))
    };
    (reports, outcome)
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).unwrap_or_else(|e| format!("<unserializable: {e}>"))
}

fn constants(r: &mut SuiteReport) {
    let limit = util_bound_exclusive_limit(1.0, 1.0, 0.0);
    let large_k = util_bound_exclusive(1_000_000, 1.0, 1.0, 0.0).unwrap_or(f64::NAN);
    let factor = grm_capacity_factor();
    let checks = [
        ("exclusive bound limit", limit, 2.0 - 2f64.sqrt(), 1e-6),
        ("exclusive bound at k = 1e6", large_k, 2.0 - 2f64.sqrt(), 1e-4),
        ("capacity factor", factor, (3.0 + 7f64.sqrt()) / 2.0, 1e-6),
    ];
    for (what, got, want, tol) in checks {
        r.checked += 1;
        if !((got - want).abs() <= tol) {
            r.fail(what, format!("{got} vs {want}"));
        }
    }
    r.summary = format!("2-sqrt(2) = {limit:.6} (k = 1e6: {large_k:.6}), capacity factor {factor:.6}");
}

/// Integer uniprocessor set with ΣU in [0.05, 0.99], n <= 10, constrained or
/// arbitrary deadlines, RM or DM.
fn uniprocessor_set(seed: u64, trial: u64) -> k2q::Result<TaskSet> {
    let mut rng = trial_rng(seed, trial);
    let n = rng.gen_range(1..=10);
    let arbitrary = rng.gen_bool(0.5);
    let cfg = GenConfig {
        integer_mode: true,
        period_range: (10.0, 1000.0),
        deadline_ratio_range: if arbitrary { (1.0, 4.0) } else { (0.5, 1.0) },
        policy: if rng.gen_bool(0.5) { PriorityPolicy::Rm } else { PriorityPolicy::Dm },
        ..GenConfig::new(n, rng.gen_range(0.05..=0.99f64).min(n as f64))
    };
    gen_taskset_rng(&cfg, &mut rng)
}

fn safety(r: &mut SuiteReport, seed: u64, count: u64) {
    let mut accepted = [0usize; 3];
    for trial in 0..count {
        let ts = match uniprocessor_set(seed, trial) {
            Ok(ts) => ts,
            Err(e) => return r.fail("generator", e),
        };
        for k in 0..ts.len() {
            r.checked += 1;
            let deadline = ts.tasks()[k].deadline;
            let outcome = busy_window_exact(&ts, k).and_then(|exact| {
                let verdicts = [
                    test_arbitrary_window(&ts, k)?,
                    response_sched_test(&ts, k)?,
                    rm_util_bounds(&ts, k)?.verdict,
                ];
                Ok((exact, verdicts))
            });
            let (exact, verdicts) = match outcome {
                Ok(v) => v,
                Err(e) => {
                    r.fail(format!("task {k}: {e}"), ts.to_json());
                    continue;
                }
            };
            for (slot, v) in verdicts.iter().enumerate() {
                if v.is_schedulable() {
                    accepted[slot] += 1;
                    if !exact.meets(deadline) {
                        r.fail(format!("task {k} accepted by {v}, exact response {exact}"), ts.to_json());
                    }
                }
            }
        }
    }
    r.summary = format!(
        "{count} sets; accepted window/response/rm-util = {}/{}/{}",
        accepted[0], accepted[1], accepted[2]
    );
}

fn response(r: &mut SuiteReport, seed: u64, count: u64) {
    let (mut eligible, mut strict) = (0usize, 0usize);
    for trial in 0..count {
        let ts = match uniprocessor_set(seed, trial) {
            Ok(ts) => ts,
            Err(e) => return r.fail("generator", e),
        };
        for k in 0..ts.len() {
            r.checked += 1;
            let values = (|| {
                Ok::<_, k2q::Error>((
                    busy_window_exact(&ts, k)?.as_f64(),
                    wcrt_bound(&ts, k)?.as_f64(),
                    bini_bound(&ts, k)?.as_f64(),
                ))
            })();
            let (exact, ours, bini) = match values {
                Ok(v) => v,
                Err(e) => {
                    r.fail(format!("task {k}: {e}"), ts.to_json());
                    continue;
                }
            };
            if ours < exact * (1.0 - 1e-12) {
                r.fail(format!("task {k}: bound {ours} below exact {exact}"), ts.to_json());
            }
            if ours > bini * (1.0 + 1e-12) {
                r.fail(format!("task {k}: bound {ours} above utilization-based {bini}"), ts.to_json());
            }
            if k >= 2 {
                eligible += 1;
                if ours < bini * (1.0 - 1e-12) {
                    strict += 1;
                }
            }
        }
    }
    r.summary = format!(
        "strictly tighter than the utilization-based bound on {:.1}% of tasks with k >= 3",
        100.0 * strict as f64 / eligible.max(1) as f64
    );
}

/// Random k-point instance satisfying Σα_iU_i < 1 and Σβ_iC_i < t_k.
fn random_instance<R: Rng>(rng: &mut R, entries: usize) -> k2q::Result<KPointInstance> {
    let tk = rng.gen_range(1.0..1000.0);
    let sa = rng.gen_range(0.01..0.99);
    let sb = rng.gen_range(0.01..0.99);
    let (wa, wb) = if entries > 0 {
        (uunifast_rng(entries, sa, rng)?, uunifast_rng(entries, sb, rng)?)
    } else {
        (vec![], vec![])
    };
    let list = wa
        .iter()
        .zip(&wb)
        .map(|(&a, &b)| {
            let alpha: f64 = rng.gen_range(0.1..2.0);
            let beta: f64 = rng.gen_range(0.1..2.0);
            let util = (a / alpha).min(1.0);
            KPointEntry::new(a / util, beta, b * tk / beta, util)
        })
        .collect();
    KPointInstance::new(list, rng.gen_range(0.1..10.0), Some(tk))
}

fn lp(r: &mut SuiteReport, seed: u64, count: u64) {
    let mut worst = 0.0f64;
    for trial in 0..count {
        let mut rng = trial_rng(seed ^ 4, trial);
        let n = rng.gen_range(0..=5);
        let inst = match random_instance(&mut rng, n) {
            Ok(i) => i,
            Err(e) => return r.fail("generator", e),
        };
        r.checked += 1;
        let tk = inst.tk.unwrap_or(1.0);
        match lp_min_ck(&inst) {
            Ok(min) => {
                let gap = (tk * quadratic_rhs(&inst.entries, tk) - min).abs() / tk;
                worst = worst.max(gap);
                if gap > 1e-9 {
                    r.fail(format!("closed form off the LP minimum by {gap:.3e}"), json(&inst));
                }
            }
            Err(e) => r.fail(e, json(&inst)),
        }
    }
    r.summary = format!("max |gap|/tk = {worst:.2e}");
}

fn ordering(r: &mut SuiteReport, seed: u64, count: u64) {
    let mut worst = 0.0f64;
    for trial in 0..count {
        let mut rng = trial_rng(seed ^ 5, trial);
        let n = rng.gen_range(2..=7);
        let inst = match random_instance(&mut rng, n) {
            Ok(i) => i,
            Err(e) => return r.fail("generator", e),
        };
        r.checked += 1;
        let tk = inst.tk.unwrap_or(1.0);
        let brute = permutation_minmax(&inst, Objective::QuadraticRhs)
            .and_then(|(_, s)| Ok((s, permutation_minmax(&inst, Objective::ResponseBound)?.1)));
        let (brute_s, brute_r) = match brute {
            Ok(v) => v,
            Err(e) => {
                r.fail(e, json(&inst));
                continue;
            }
        };
        let sorted_s = quadratic_rhs(&worst_case_ordering_sched(&inst.entries), tk);
        let sorted_r =
            response_bound_general(&inst.with_entries(worst_case_ordering_response(&inst.entries))).as_f64();
        let gap = (brute_s - sorted_s).abs().max((brute_r - sorted_r).abs() / brute_r.abs().max(1.0));
        worst = worst.max(gap);
        if gap > 1e-12 {
            r.fail(format!("sorted order off the brute-force optimum by {gap:.3e}"), json(&inst));
        }
    }
    r.summary = format!("max gap {worst:.2e}");
}

/// Divisors of 7200 in [50, 1000]; any mix has a hyperperiod of at most 7200.
const SHORT_HYPERPERIOD: [f64; 26] = [
    50.0, 60.0, 72.0, 75.0, 80.0, 90.0, 96.0, 100.0, 120.0, 144.0, 150.0, 160.0, 180.0, 200.0,
    225.0, 240.0, 288.0, 300.0, 360.0, 400.0, 450.0, 480.0, 600.0, 720.0, 800.0, 900.0,
];

/// Implicit-deadline RM set on 2 or 4 processors. Even trials draw
/// log-uniform periods, odd trials periods with a short hyperperiod.
fn global_rm_set(seed: u64, trial: u64) -> k2q::Result<TaskSet> {
    let mut rng = trial_rng(seed ^ 6, trial);
    let m = if rng.gen_bool(0.5) { 2 } else { 4 };
    let n = rng.gen_range(m + 1..=3 * m + 2);
    let total = rng.gen_range(0.1..0.7) * m as f64;
    let cfg = GenConfig {
        integer_mode: true,
        period_range: (50.0, 1000.0),
        processors: m,
        policy: PriorityPolicy::Rm,
        ..GenConfig::new(n, total)
    };
    if trial % 2 == 0 {
        return gen_taskset_rng(&cfg, &mut rng);
    }
    let tasks = uunifast_rng(n, total, &mut rng)?
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let period = *SHORT_HYPERPERIOD.choose(&mut rng).expect("nonempty menu");
            Task::implicit(format!("tau{}", i + 1), (u * period).floor().max(1.0), period)
        })
        .collect();
    Ok(k2q::task::assign_priorities(&TaskSet::new(tasks, m)?, PriorityPolicy::Rm))
}

fn falsification(r: &mut SuiteReport, seed: u64, count: u64) {
    let cfg = SimConfig { horizon_cap: 1_000_000, record_events: false };
    let (mut capped, mut trial) = (0u64, 0u64);
    while r.checked < count && trial < count.saturating_mul(200) {
        let ts = match global_rm_set(seed, trial) {
            Ok(ts) => ts,
            Err(e) => return r.fail("generator", e),
        };
        trial += 1;
        let accepted = (0..ts.len()).all(|k| grm_quadratic_test(&ts, k).is_ok_and(|v| v.is_schedulable()));
        if !accepted {
            continue;
        }
        r.checked += 1;
        match simulate_global_fp(&ts, &cfg) {
            Ok(trace) => {
                capped += u64::from(trace.capped);
                if let Some(miss) = trace.misses.first() {
                    r.fail(format!("accepted set misses at t = {}", miss.time), ts.to_json());
                }
            }
            Err(e) => r.fail(e, ts.to_json()),
        }
    }
    if r.checked < count {
        r.fail("too few accepted sets", format!("{} of {count} after {trial} draws", r.checked));
    }
    r.summary = format!(
        "{} accepted sets simulated, {capped} inconclusive (hyperperiod above 1e6)",
        r.checked
    );
}

fn dominance(r: &mut SuiteReport, points: u64) {
    let points = points.max(2);
    for i in 0..points {
        let x = i as f64 / (points - 1) as f64;
        r.checked += 1;
        let ours = grm_util_bound_limit(x);
        let theirs = (1.0 - x) / 2.0;
        if ours < theirs - 1e-12 {
            r.fail(format!("{ours} < {theirs}"), format!("U_max = {x}"));
        }
    }
    r.summary = "2 - sqrt(2 + 2x) >= (1 - x) / 2 on a uniform grid over [0, 1]".into();
}

fn pigeonhole(r: &mut SuiteReport, seed: u64, count: u64) {
    let mut labels = BTreeMap::new();
    let mut trial = 0u64;
    while r.checked < count && trial < count.saturating_mul(100) {
        let mut rng = trial_rng(seed ^ 8, trial);
        trial += 1;
        let m = *[2usize, 4, 8].choose(&mut rng).expect("nonempty");
        let total = rng.gen_range(0.2..1.0) * m as f64;
        let n = rng.gen_range(((total / 0.4).ceil() as usize).max(2)..=3 * m + 2);
        let cfg = GenConfig {
            integer_mode: true,
            period_range: (10.0, 1000.0),
            deadline_ratio_range: (0.3, 1.0),
            processors: m,
            policy: PriorityPolicy::Dm,
            ..GenConfig::new(n, total)
        };
        let ts = match gen_taskset_rng(&cfg, &mut rng) {
            Ok(ts) => ts,
            Err(e) => return r.fail("generator", e),
        };
        let rejected: Vec<usize> = (0..ts.len())
            .filter(|&k| gdm_quadratic_test(&ts, k).is_ok_and(|v| v.status == Status::NotProven))
            .collect();
        if rejected.is_empty() {
            continue;
        }
        r.checked += 1;
        for k in rejected {
            match gdm_speedup_witness(&ts, k) {
                Ok(w) if w.value() > 1.0 / 3.0 => *labels.entry(w.label()).or_insert(0u64) += 1,
                Ok(w) => r.fail(format!("task {k}: largest term {w} not above 1/3"), ts.to_json()),
                Err(e) => r.fail(format!("task {k}: {e}"), ts.to_json()),
            }
        }
    }
    r.summary = format!("rejected sets checked; witnesses {labels:?}");
}

/// Utilization bounds must imply the quadratic condition they relax, and
/// the global RM utilization test must imply the global RM quadratic test.
fn implication(r: &mut SuiteReport, seed: u64, count: u64) {
    for trial in 0..count {
        let mut rng = trial_rng(seed ^ 9, trial);
        let k = rng.gen_range(2..40usize);
        let alpha = rng.gen_range(0.2..2.0);
        let beta = rng.gen_range(0.2..2.0);
        let c = rng.gen_range(0.0..1.0);
        let frac = rng.gen_range(0.01..1.0);
        r.checked += 1;
        if let Ok(bound) = util_bound_exclusive(k, alpha, beta, c) {
            if let Ok(utils) = uunifast_rng(k - 1, bound * frac, &mut rng) {
                let v = quadratic_bound_uniform(&utils, alpha, beta, c);
                if !v.is_schedulable() {
                    r.fail(format!("exclusive bound accepted, quadratic {v}"), json(&(alpha, beta, c, utils)));
                }
            }
        }
        if alpha + beta >= 1.0 {
            if let Ok(bound) = util_bound_inclusive(k, alpha, beta) {
                if let Ok(parts) = uunifast_rng(k, bound * frac, &mut rng) {
                    let v = quadratic_bound_uniform(&parts[..k - 1], alpha, beta, parts[k - 1]);
                    if !v.is_schedulable() {
                        r.fail(format!("inclusive bound accepted, quadratic {v}"), json(&(alpha, beta, parts)));
                    }
                }
            }
        }
        let Ok(ts) = global_rm_set(seed ^ 9, trial) else { continue };
        for k in 0..ts.len() {
            let util = grm_util_test(&ts, k);
            let quad = grm_quadratic_test(&ts, k);
            if let (Ok(u), Ok(q)) = (util, quad) {
                if u.is_schedulable() && !q.is_schedulable() {
                    r.fail(format!("task {k}: utilization test accepts, quadratic {q}"), ts.to_json());
                }
            }
        }
    }
    r.summary = "utilization bounds imply the quadratic conditions".into();
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_parse() {
        assert_eq!(parse_suites("all").unwrap().len(), 9);
        assert_eq!(parse_suites("lp, safety").unwrap(), vec![Suite::Lp, Suite::Safety]);
        assert!(parse_suites("nope").is_err());
    }

    #[test]
    fn small_runs_pass() {
        let suites = [Suite::Constants, Suite::Safety, Suite::Lp, Suite::Ordering, Suite::Implication];
        let (reports, outcome) = verify(&suites, 7, Some(30));
        for r in &reports {
            assert!(r.passed(), "{r}");
            assert!(r.checked > 0);
        }
        assert!(outcome.is_ok());
    }
}
