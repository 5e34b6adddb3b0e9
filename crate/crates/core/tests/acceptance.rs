//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Built without the libtest harness so the lines always show.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use k2q::k2q::{
    quadratic_rhs, response_bound_general, util_bound_exclusive, worst_case_ordering_response,
    worst_case_ordering_sched, KPointEntry, KPointInstance,
};
use k2q::multiproc::{
    gdm_quadratic_test, gdm_speedup_witness, grm_capacity_factor, grm_quadratic_test,
    grm_util_bound_limit,
};
use k2q::oracles::{busy_window_exact, lp_min_ck, permutation_minmax, simulate_global_fp, Objective, SimConfig};
use k2q::uniproc::{bini_bound, response_sched_test, rm_util_bounds, test_arbitrary_window, wcrt_bound};
use k2q::workload::{gen_taskset_rng, trial_rng, uunifast_rng, GenConfig};
use k2q::{PriorityPolicy, Status, Task, TaskSet};

const SEED: u64 = 0x6b32_715f;

struct Outcome {
    pass: bool,
    detail: String,
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    out.detail = format!("{}; {:.2?}", out.detail, elapsed);
    if let Some(limit) = limit {
        if elapsed > limit {
            out.pass = false;
            out.detail = format!("{} exceeds {:?}", out.detail, limit);
        }
    }
    out
}

fn constants() -> Outcome {
    let exclusive = util_bound_exclusive(1_000_000, 1.0, 1.0, 0.0).unwrap();
    let factor = grm_capacity_factor();
    Outcome {
        pass: (exclusive - 0.585786).abs() <= 1e-4 && (factor - 2.822876).abs() <= 1e-5,
        detail: format!("exclusive bound {exclusive:.6}, capacity factor {factor:.6}"),
    }
}

/// Integer uniprocessor sets with ΣU in [0.05, 0.99], n <= 10, half with
/// constrained and half with arbitrary deadlines, RM or DM.
fn uniprocessor_corpus(count: u64) -> Vec<TaskSet> {
    (0..count)
        .map(|trial| {
            let mut rng = trial_rng(SEED, trial);
            let n = rng.gen_range(1..=10);
            let arbitrary = rng.gen_bool(0.5);
            let cfg = GenConfig {
                integer_mode: true,
                period_range: (10.0, 1000.0),
                deadline_ratio_range: if arbitrary { (1.0, 4.0) } else { (0.5, 1.0) },
                policy: if rng.gen_bool(0.5) { PriorityPolicy::Rm } else { PriorityPolicy::Dm },
                ..GenConfig::new(n, rng.gen_range(0.05..=0.99f64).min(n as f64))
            };
            gen_taskset_rng(&cfg, &mut rng).unwrap()
        })
        .collect()
}

fn safety() -> Outcome {
    let corpus = uniprocessor_corpus(10_000);
    let mut violations = Vec::new();
    let mut accepted = [0usize; 3];
    let mut tasks = 0usize;
    for ts in &corpus {
        for k in 0..ts.len() {
            tasks += 1;
            let exact = busy_window_exact(ts, k).unwrap();
            let deadline = ts.tasks()[k].deadline;
            let verdicts = [
                test_arbitrary_window(ts, k).unwrap(),
                response_sched_test(ts, k).unwrap(),
                rm_util_bounds(ts, k).unwrap().verdict,
            ];
            for (slot, v) in verdicts.iter().enumerate() {
                if v.is_schedulable() {
                    accepted[slot] += 1;
                    if !exact.meets(deadline) {
                        violations.push(format!("task {k} {v}: {}", ts.to_json()));
                    }
                }
            }
        }
    }
    for v in violations.iter().take(5) {
        println!("  counterexample: {v}");
    }
    Outcome {
        pass: violations.is_empty(),
        detail: format!(
            "{} sets, {tasks} tasks, accepted window/response/rm-util = {}/{}/{}, {} violations",
            corpus.len(),
            accepted[0],
            accepted[1],
            accepted[2],
            violations.len()
        ),
    }
}

fn response_dominance() -> Outcome {
    let corpus = uniprocessor_corpus(10_000);
    let (mut below_exact, mut above_bini) = (0usize, 0usize);
    let (mut eligible, mut strict) = (0usize, 0usize);
    for ts in &corpus {
        for k in 0..ts.len() {
            let exact = busy_window_exact(ts, k).unwrap().as_f64();
            let ours = wcrt_bound(ts, k).unwrap().as_f64();
            let bini = bini_bound(ts, k).unwrap().as_f64();
            if ours < exact * (1.0 - 1e-12) {
                below_exact += 1;
            }
            if ours > bini * (1.0 + 1e-12) {
                above_bini += 1;
            }
            if k >= 2 {
                eligible += 1;
                if ours < bini * (1.0 - 1e-12) {
                    strict += 1;
                }
            }
        }
    }
    let fraction = strict as f64 / eligible.max(1) as f64;
    Outcome {
        pass: below_exact == 0 && above_bini == 0,
        detail: format!(
            "{below_exact} bounds below exact, {above_bini} above the utilization-based bound; \
             strictly tighter on {strict}/{eligible} = {:.1}% of tasks with k >= 3 (expected >= 30%: {})",
            100.0 * fraction,
            if fraction >= 0.3 { "met" } else { "not met" }
        ),
    }
}

/// Random instance with both preconditions, `entries` higher-priority terms.
fn random_instance<R: Rng>(rng: &mut R, entries: usize) -> KPointInstance {
    let tk = rng.gen_range(1.0..1000.0);
    let sa = rng.gen_range(0.01..0.99);
    let sb = rng.gen_range(0.01..0.99);
    let wa = if entries > 0 { uunifast_rng(entries, sa, rng).unwrap() } else { vec![] };
    let wb = if entries > 0 { uunifast_rng(entries, sb, rng).unwrap() } else { vec![] };
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
    KPointInstance::new(list, rng.gen_range(0.1..10.0), Some(tk)).unwrap()
}

fn lp_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    let mut failures = 0;
    for trial in 0..1000 {
        let mut rng = trial_rng(SEED ^ 4, trial);
        let n = rng.gen_range(0..=5);
        let inst = random_instance(&mut rng, n);
        let tk = inst.tk.unwrap();
        let gap = (tk * quadratic_rhs(&inst.entries, tk) - lp_min_ck(&inst).unwrap()).abs() / tk;
        worst = worst.max(gap);
        if gap > 1e-9 {
            failures += 1;
        }
    }
    Outcome {
        pass: failures == 0,
        detail: format!("1000 instances, max |gap|/tk = {worst:.2e}, {failures} beyond 1e-9"),
    }
}

fn ordering() -> Outcome {
    let mut failures = 0;
    let mut worst = 0.0f64;
    for trial in 0..500 {
        let mut rng = trial_rng(SEED ^ 5, trial);
        let n = rng.gen_range(2..=7);
        let inst = random_instance(&mut rng, n);
        let tk = inst.tk.unwrap();
        let (_, brute) = permutation_minmax(&inst, Objective::QuadraticRhs).unwrap();
        let sorted = quadratic_rhs(&worst_case_ordering_sched(&inst.entries), tk);
        let gap = (brute - sorted).abs();
        let (_, brute_r) = permutation_minmax(&inst, Objective::ResponseBound).unwrap();
        let sorted_r = response_bound_general(
            &inst.with_entries(worst_case_ordering_response(&inst.entries)),
        )
        .as_f64();
        // Response values are not normalized, so compare relative to them.
        let gap_r = (brute_r - sorted_r).abs() / brute_r.abs().max(1.0);
        worst = worst.max(gap).max(gap_r);
        if gap > 1e-12 || gap_r > 1e-12 {
            failures += 1;
        }
    }
    Outcome {
        pass: failures == 0,
        detail: format!("500 instances, max gap {worst:.2e}, {failures} beyond 1e-12"),
    }
}

/// Divisors of 7200 in [50, 1000]; any mix has a hyperperiod of at most 7200.
const SHORT_HYPERPERIOD: [f64; 26] = [
    50.0, 60.0, 72.0, 75.0, 80.0, 90.0, 96.0, 100.0, 120.0, 144.0, 150.0, 160.0, 180.0, 200.0,
    225.0, 240.0, 288.0, 300.0, 360.0, 400.0, 450.0, 480.0, 600.0, 720.0, 800.0, 900.0,
];

/// Implicit-deadline RM set on `m` processors. Even trials draw log-uniform
/// periods in [50, 1000], odd trials pick periods with a short hyperperiod.
fn global_rm_set(trial: u64) -> TaskSet {
    let mut rng = trial_rng(SEED ^ 6, trial);
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
        return gen_taskset_rng(&cfg, &mut rng).unwrap();
    }
    let utils = uunifast_rng(n, total, &mut rng).unwrap();
    let tasks = utils
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let period = *SHORT_HYPERPERIOD.choose(&mut rng).unwrap();
            let wcet = (u * period).floor().max(1.0);
            Task::implicit(format!("tau{}", i + 1), wcet, period)
        })
        .collect();
    k2q::task::assign_priorities(&TaskSet::new(tasks, m).unwrap(), PriorityPolicy::Rm)
}

fn falsification() -> Outcome {
    let cfg = SimConfig {
        horizon_cap: 1_000_000,
        record_events: false,
    };
    let (mut accepted, mut misses, mut capped, mut trial) = (0usize, 0usize, 0usize, 0u64);
    while accepted < 1000 && trial < 200_000 {
        let ts = global_rm_set(trial);
        trial += 1;
        if !(0..ts.len()).all(|k| grm_quadratic_test(&ts, k).unwrap().is_schedulable()) {
            continue;
        }
        accepted += 1;
        let trace = simulate_global_fp(&ts, &cfg).unwrap();
        if trace.capped {
            capped += 1;
        }
        if trace.has_miss() {
            misses += 1;
            println!("  counterexample: {} first miss {:?}", ts.to_json(), trace.misses[0]);
        }
    }
    Outcome {
        pass: accepted == 1000 && misses == 0,
        detail: format!(
            "{accepted} accepted sets (of {trial} drawn), {misses} with a miss, \
             {capped} inconclusive ({:.1}%, hyperperiod above 1e6)",
            100.0 * capped as f64 / accepted.max(1) as f64
        ),
    }
}

fn halving_bound_grid() -> Outcome {
    let points = 10_000;
    let violations = (0..points)
        .map(|i| i as f64 / (points - 1) as f64)
        .filter(|&x| grm_util_bound_limit(x) < (1.0 - x) / 2.0 - 1e-12)
        .count();
    Outcome {
        pass: violations == 0,
        detail: format!("{points} grid points on [0, 1], {violations} violations"),
    }
}

fn pigeonhole() -> Outcome {
    let (mut rejected, mut missing, mut trial) = (0usize, 0usize, 0u64);
    let mut labels = std::collections::BTreeMap::new();
    while rejected < 10_000 && trial < 1_000_000 {
        let mut rng = trial_rng(SEED ^ 8, trial);
        trial += 1;
        let m = *[2usize, 4, 8].choose(&mut rng).unwrap();
        let total = rng.gen_range(0.2..1.0) * m as f64;
        // Keep ΣU <= 0.4 n so discarding draws with some U_i > 1 stays cheap.
        let n = rng.gen_range(((total / 0.4).ceil() as usize).max(2)..=3 * m + 2);
        let cfg = GenConfig {
            integer_mode: true,
            period_range: (10.0, 1000.0),
            deadline_ratio_range: (0.3, 1.0),
            processors: m,
            policy: PriorityPolicy::Dm,
            ..GenConfig::new(n, total)
        };
        let ts = gen_taskset_rng(&cfg, &mut rng).unwrap();
        let rejected_tasks: Vec<usize> = (0..ts.len())
            .filter(|&k| gdm_quadratic_test(&ts, k).unwrap().status == Status::NotProven)
            .collect();
        if rejected_tasks.is_empty() {
            continue;
        }
        rejected += 1;
        for k in rejected_tasks {
            match gdm_speedup_witness(&ts, k) {
                Ok(w) if w.value() > 1.0 / 3.0 => *labels.entry(w.label()).or_insert(0) += 1,
                _ => missing += 1,
            }
        }
    }
    Outcome {
        pass: rejected == 10_000 && missing == 0,
        detail: format!("{rejected} rejected sets, {missing} tasks without a witness, witnesses {labels:?}"),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, Option<Duration>, fn() -> Outcome); 8] = [
        ("1 constants", Some(Duration::from_secs(1)), constants),
        ("2 uniprocessor safety", Some(Duration::from_secs(60)), safety),
        ("3 response dominance", None, response_dominance),
        ("4 LP equivalence", Some(Duration::from_secs(10)), lp_equivalence),
        ("5 ordering optimality", None, ordering),
        ("6 multiprocessor falsification", None, falsification),
        ("7 dominance over (1 - U_max)/2", None, halving_bound_grid),
        ("8 pigeonhole witness", None, pigeonhole),
    ];
    let mut failed = 0;
    for (name, limit, run) in criteria {
        let out = timed(limit, run);
        if !out.pass {
            failed += 1;
        }
        println!("{} criterion {name}: {}", if out.pass { "PASS" } else { "FAIL" }, out.detail);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
