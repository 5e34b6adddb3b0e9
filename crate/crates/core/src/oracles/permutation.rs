use itertools::Itertools;

use crate::error::{Error, Result};
use crate::k2q::{quadratic_rhs, response_bound_general, KPointEntry, KPointInstance};

pub const MAX_PERMUTATION_ENTRIES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Right-hand side of the general quadratic condition; minimized.
    QuadraticRhs,
    /// The response-time bound; maximized.
    ResponseBound,
}

/// Tries every ordering of the entries and returns the worst one with its
/// value. Ties keep the lexicographically first index order.
pub fn permutation_minmax(inst: &KPointInstance, objective: Objective) -> Result<(Vec<usize>, f64)> {
    let n = inst.entries.len();
    if n > MAX_PERMUTATION_ENTRIES {
        return Err(Error::TooLarge {
            got: n,
            max: MAX_PERMUTATION_ENTRIES,
        });
    }
    let tk = match objective {
        Objective::QuadraticRhs => inst
            .tk
            .ok_or_else(|| Error::InvalidInstance("window length tk is required".into()))?,
        Objective::ResponseBound => 0.0,
    };
    let value = |order: &[usize]| {
        let entries: Vec<KPointEntry> = order.iter().map(|&i| inst.entries[i]).collect();
        match objective {
            Objective::QuadraticRhs => -quadratic_rhs(&entries, tk),
            Objective::ResponseBound => response_bound_general(&inst.with_entries(entries)).as_f64(),
        }
    };
    let mut best: Option<(Vec<usize>, f64)> = None;
    for order in (0..n).permutations(n) {
        let v = value(&order);
        if best.as_ref().map_or(true, |(_, b)| v > *b) {
            best = Some((order, v));
        }
    }
    let (order, v) = best.expect("at least the empty ordering");
    Ok(match objective {
        Objective::QuadraticRhs => (order, -v),
        Objective::ResponseBound => (order, v),
    })
}
