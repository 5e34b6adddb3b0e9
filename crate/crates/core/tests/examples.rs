//! Worked examples checked against the exact oracles rather than against
//! hand-computed numbers alone.

use k2q::k2q::{
    kpoint_test_direct, quadratic_bound_general, quadratic_rhs, uniform_rhs_closed,
    uniform_rhs_pairwise, worst_case_ordering_sched, KPointEntry, KPointInstance,
};
use k2q::multiproc::{gdm_quadratic_test, grm_quadratic_test};
use k2q::oracles::{
    busy_window_exact, lp_min_ck, permutation_minmax, simulate_global_fp, tda_exact,
    ExactResponse, Objective, SimConfig,
};
use k2q::uniproc::{
    rkh_bound, response_sched_test, test_arbitrary_window, virtual_task, wcrt_bound,
};
use k2q::{parse_taskset, Task, TaskSet};

fn uni(tasks: &[(f64, f64, f64)]) -> TaskSet {
    TaskSet::uniprocessor(
        tasks
            .iter()
            .enumerate()
            .map(|(i, &(c, t, d))| Task::new(format!("t{i}"), c, t, d))
            .collect(),
    )
    .unwrap()
}

fn entries(raw: &[(f64, f64, f64, f64)]) -> Vec<KPointEntry> {
    raw.iter()
        .map(|&(a, b, c, u)| KPointEntry::new(a, b, c, u))
        .collect()
}

#[test]
fn general_bound_is_the_lp_minimum() {
    let inst = KPointInstance::new(entries(&[(1.0, 1.0, 1.0, 0.25); 2]), 3.75, Some(10.0)).unwrap();
    let v = quadratic_bound_general(&inst).unwrap();
    assert!((v.bound - 0.375).abs() < 1e-12);
    assert!(v.is_schedulable());
    assert!((lp_min_ck(&inst).unwrap() - 3.75).abs() < 1e-12);

    let over = KPointInstance::new(inst.entries.clone(), 3.76, Some(10.0)).unwrap();
    assert!(!quadratic_bound_general(&over).unwrap().is_schedulable());
}

#[test]
fn direct_test_at_the_lp_points_is_tight() {
    // At the extreme point every one of the k conditions holds with equality
    // when ck equals the LP minimum, so a hair more fails all of them.
    let raw = entries(&[(1.0, 1.0, 1.0, 0.25); 2]);
    let at = KPointInstance::new(raw.clone(), 3.75, Some(10.0)).unwrap();
    assert!(kpoint_test_direct(&at, &[8.0, 9.0, 10.0]).unwrap().is_schedulable());
    let above = KPointInstance::new(raw, 3.75 + 1e-6, Some(10.0)).unwrap();
    assert!(!kpoint_test_direct(&above, &[8.0, 9.0, 10.0]).unwrap().is_schedulable());
}

#[test]
fn worst_case_order_matches_brute_force() {
    let raw = entries(&[
        (1.0, 0.5, 3.0, 0.1),
        (0.5, 1.0, 1.0, 0.3),
        (1.0, 1.0, 2.0, 0.05),
        (0.8, 0.8, 4.0, 0.2),
        (1.0, 0.3, 1.0, 0.1),
        (0.6, 1.0, 0.5, 0.15),
    ]);
    let inst = KPointInstance::new(raw.clone(), 1.0, Some(30.0)).unwrap();
    let (_, best) = permutation_minmax(&inst, Objective::QuadraticRhs).unwrap();
    let sorted = quadratic_rhs(&worst_case_ordering_sched(&raw), 30.0);
    assert!((best - sorted).abs() < 1e-12);
}

#[test]
fn uniform_forms_agree() {
    for u in [vec![0.25, 0.25], vec![0.5], vec![], vec![0.1, 0.7, 0.05]] {
        let a = uniform_rhs_pairwise(&u, 1.0, 1.0);
        let b = uniform_rhs_closed(&u, 1.0, 1.0);
        assert!((a - b).abs() < 1e-12);
    }
    assert!((uniform_rhs_closed(&[0.25, 0.25], 1.0, 1.0) - 0.1875).abs() < 1e-15);
}

#[test]
fn window_test_example_and_exact_response() {
    let ts = uni(&[(1.0, 3.0, 3.0), (1.0, 20.0, 20.0), (1.0, 4.0, 8.0)]);
    assert_eq!(virtual_task(&ts, 2).unwrap().ck_prime, 3.0);
    let v = test_arbitrary_window(&ts, 2).unwrap();
    assert!(v.is_schedulable());
    assert!((v.bound - 7.0 / 12.0).abs() < 1e-12);
    assert_eq!(busy_window_exact(&ts, 2).unwrap(), ExactResponse::Finite(3));
}

#[test]
fn response_bounds_dominate_exact() {
    let ts = uni(&[(2.0, 4.0, 4.0), (1.0, 3.0, 3.0)]);
    assert_eq!(busy_window_exact(&ts, 1).unwrap(), ExactResponse::Finite(3));
    assert_eq!(wcrt_bound(&ts, 1).unwrap().as_f64(), 4.0);
    assert_eq!(rkh_bound(&ts, 1, 2).unwrap().as_f64(), 6.0);

    let ts = uni(&[(2.0, 8.0, 8.0), (1.0, 4.0, 4.0), (1.0, 4.0, 4.0)]);
    assert_eq!(busy_window_exact(&ts, 2).unwrap(), ExactResponse::Finite(4));
    assert_eq!(wcrt_bound(&ts, 2).unwrap().as_f64(), 6.0);
}

#[test]
fn sufficient_but_not_exact() {
    let ts = uni(&[(2.0, 4.0, 4.0), (1.0, 3.0, 3.0)]);
    assert!(!response_sched_test(&ts, 1).unwrap().is_schedulable());
    assert!(tda_exact(&ts, 1).unwrap().is_schedulable());

    let ts = uni(&[(1.0, 4.0, 4.0), (1.0, 4.0, 4.0)]);
    assert!(response_sched_test(&ts, 1).unwrap().is_schedulable());
    let exact = tda_exact(&ts, 1).unwrap();
    assert!(exact.is_schedulable());
    assert_eq!(exact.lhs, 2.0);
}

#[test]
fn tda_scaled_example() {
    // C = 1.5, D = 4 against (1, 3), doubled onto integer ticks.
    let ts = uni(&[(2.0, 6.0, 6.0), (3.0, 8.0, 8.0)]);
    let v = tda_exact(&ts, 1).unwrap();
    assert!(v.is_schedulable());
    assert_eq!(v.lhs, 5.0);
}

#[test]
fn global_tests_survive_simulation() {
    // U_k = 0.5 <= 0.5625 behind one task of utilization 0.5 on two
    // processors, plus a third task to keep both busy.
    let ts = parse_taskset(
        r#"{"processors": 2, "tasks": [
            {"id": "a", "C": 5, "T": 10, "D": 10},
            {"id": "b", "C": 10, "T": 20, "D": 20},
            {"id": "c", "C": 20, "T": 40, "D": 40}]}"#,
    )
    .unwrap();
    assert!((grm_quadratic_test(&ts, 1).unwrap().bound - 0.5625).abs() < 1e-12);
    assert!(grm_quadratic_test(&ts, 1).unwrap().is_schedulable());
    let trace = simulate_global_fp(&ts, &SimConfig::default()).unwrap();
    assert!(!trace.has_miss());
    assert!(!trace.capped);

    let ts = TaskSet::new(
        vec![
            Task::implicit("a", 1.0, 5.0),
            Task::implicit("b", 1.0, 4.0),
            Task::new("k", 2.0, 20.0, 10.0),
        ],
        2,
    )
    .unwrap();
    let v = gdm_quadratic_test(&ts, 2).unwrap();
    assert!((v.bound - 0.69125).abs() < 1e-12);
    assert!(v.is_schedulable());
    assert!(!simulate_global_fp(&ts, &SimConfig::default()).unwrap().has_miss());
}
