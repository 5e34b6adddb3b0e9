//! The linear program behind the general quadratic bound, solved by brute
//! force over its vertices.
//!
//! Variables are `x = (c, t_1, ..., t_{k-1})` with `t_k` fixed. Minimize `c`
//! subject to, for every `j`,
//! `c + Σ_i alpha_i util_i t_i + Σ_{i<j} beta_i wcet_i >= t_j`, and `t_i >= 0`.
//! The minimum is the smallest execution time for which the k-point test
//! fails at every choice of points, i.e. the largest safe `ck`.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::k2q::KPointInstance;
use crate::verdict::TOLERANCE;

pub const MAX_LP_ENTRIES: usize = 12;

/// Rows `a . x >= b`.
fn constraints(inst: &KPointInstance, tk: f64) -> Vec<(Vec<f64>, f64)> {
    let n = inst.k();
    let mut rows = Vec::with_capacity(2 * n - 1);
    let mut prefix = 0.0;
    for j in 0..n {
        let mut a = vec![0.0; n];
        a[0] = 1.0;
        for (i, e) in inst.entries.iter().enumerate() {
            a[i + 1] = e.weighted_util();
        }
        let b = if j + 1 < n {
            a[j + 1] -= 1.0;
            -prefix
        } else {
            tk - prefix
        };
        if j + 1 < n {
            prefix += inst.entries[j].weighted_wcet();
        }
        rows.push((a, b));
    }
    for i in 1..n {
        let mut a = vec![0.0; n];
        a[i] = 1.0;
        rows.push((a, 0.0));
    }
    rows
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[row][c] -= f * a[col][c];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

fn check(inst: &KPointInstance) -> Result<f64> {
    let tk = inst
        .tk
        .ok_or_else(|| Error::InvalidInstance("window length tk is required".into()))?;
    if inst.entries.len() > MAX_LP_ENTRIES {
        return Err(Error::TooLarge {
            got: inst.entries.len(),
            max: MAX_LP_ENTRIES,
        });
    }
    if inst.sum_a() > 1.0 + TOLERANCE {
        return Err(Error::NotApplicable("sum of alpha*U exceeds 1".into()));
    }
    if inst.sum_b() > tk * (1.0 + TOLERANCE) {
        return Err(Error::NotApplicable("sum of beta*C exceeds tk".into()));
    }
    Ok(tk)
}

/// Minimum of the program over all vertices: every choice of `k` tight
/// constraints out of `2k - 1` is solved and kept if feasible.
pub fn lp_min_ck(inst: &KPointInstance) -> Result<f64> {
    let tk = check(inst)?;
    let rows = constraints(inst, tk);
    let n = inst.k();
    let slack = 1e-9 * tk.max(1.0);
    let mut best = f64::INFINITY;
    for active in (0..rows.len()).combinations(n) {
        let a = active.iter().map(|&r| rows[r].0.clone()).collect();
        let b = active.iter().map(|&r| rows[r].1).collect();
        let Some(x) = solve(a, b) else { continue };
        let feasible = rows.iter().all(|(a, b)| {
            let lhs: f64 = a.iter().zip(&x).map(|(p, q)| p * q).sum();
            lhs >= b - slack
        });
        if feasible && x[0] < best {
            best = x[0];
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::InvalidInstance("program has no vertex".into()))
    }
}

/// The vertex where all `k` window constraints are tight:
/// `t_j = t_k - Σ_{i>=j} beta_i wcet_i`. Returns `(points, c)`.
pub fn lp_closed_point(inst: &KPointInstance) -> Result<(Vec<f64>, f64)> {
    let tk = check(inst)?;
    let mut points = vec![0.0; inst.entries.len()];
    let mut suffix = 0.0;
    for (j, e) in inst.entries.iter().enumerate().rev() {
        suffix += e.weighted_wcet();
        points[j] = tk - suffix;
    }
    let load: f64 = inst
        .entries
        .iter()
        .zip(&points)
        .map(|(e, t)| e.weighted_util() * t)
        .sum();
    let c = tk - load - inst.sum_b();
    points.push(tk);
    Ok((points, c))
}
