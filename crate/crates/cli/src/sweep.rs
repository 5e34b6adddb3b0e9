use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use k2q::workload::{gen_taskset_rng, trial_rng, GenConfig};

use crate::selection::TestKind;
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub util: f64,
    pub test: String,
    pub accepted: usize,
    pub total: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// CSV with header `util,test,accepted,total,ratio`, LF line endings.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["util", "test", "accepted", "total", "ratio"])
            .map_err(|e| CliError::Input(e.to_string()))?;
        for r in &self.rows {
            w.write_record([
                r.util.to_string(),
                r.test.clone(),
                r.accepted.to_string(),
                r.total.to_string(),
                format!("{:.6}", r.ratio),
            ])
            .map_err(|e| CliError::Input(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Grid values are rounded to 1e-9 so that `0.1:1:0.1` prints as `0.3`,
/// not `0.30000000000000004`.
fn tidy(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

/// `start:stop:step` (inclusive) or a comma-separated list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Input(format!("bad utilization grid `{spec}`"));
    let number = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let grid: Vec<f64> = if spec.contains(':') {
        let parts: Vec<f64> = spec.split(':').map(number).collect::<Result<_, _>>()?;
        let [start, stop, step] = parts[..] else { return Err(bad()) };
        if !(step > 0.0) || stop < start {
            return Err(bad());
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize;
        (0..=count).map(|i| tidy(start + i as f64 * step)).collect()
    } else {
        spec.split(',').map(number).collect::<Result<_, _>>()?
    };
    if grid.is_empty() || grid.iter().any(|u| !(*u > 0.0)) {
        return Err(bad());
    }
    Ok(grid)
}

/// Acceptance ratio of each test at each grid point. A set counts as
/// accepted when every task passes. Trial `t` of bucket `b` always uses
/// generator stream `b * trials + t`, so results do not depend on thread
/// scheduling.
pub fn sweep(
    base: &GenConfig,
    grid: &[f64],
    trials: u64,
    tests: &[TestKind],
) -> Result<SweepResult, CliError> {
    if trials == 0 {
        return Err(CliError::Input("trials must be at least 1".into()));
    }
    for &util in grid {
        GenConfig { total_util: util, ..base.clone() }.validate()?;
    }
    let jobs = grid.len() as u64 * trials;
    let outcomes: Vec<Vec<bool>> = (0..jobs)
        .into_par_iter()
        .map(|stream| {
            let cfg = GenConfig {
                total_util: grid[(stream / trials) as usize],
                ..base.clone()
            };
            let ts = gen_taskset_rng(&cfg, &mut trial_rng(base.seed, stream))?;
            tests.iter().map(|t| t.accepts(&ts)).collect::<Result<Vec<bool>, _>>()
        })
        .collect::<Result<_, k2q::Error>>()?;

    let mut rows = Vec::with_capacity(grid.len() * tests.len());
    for (b, &util) in grid.iter().enumerate() {
        let bucket = &outcomes[b * trials as usize..(b + 1) * trials as usize];
        for (j, test) in tests.iter().enumerate() {
            let accepted = bucket.iter().filter(|o| o[j]).count();
            rows.push(SweepRow {
                util,
                test: test.name().to_owned(),
                accepted,
                total: trials as usize,
                ratio: accepted as f64 / trials as f64,
            });
        }
    }
    Ok(SweepResult { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.1:0.5:0.1").unwrap(), vec![0.1, 0.2, 0.3, 0.4, 0.5]);
        assert_eq!(parse_grid("0.25, 0.5").unwrap(), vec![0.25, 0.5]);
        assert!(parse_grid("0.5:0.1:0.1").is_err());
        assert!(parse_grid("a,b").is_err());
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0,0.5").is_err());
    }

    #[test]
    fn low_load_is_accepted_and_csv_is_stable() {
        let cfg = GenConfig { seed: 3, ..GenConfig::new(5, 0.5) };
        let tests = [TestKind::Window, TestKind::Response];
        let a = sweep(&cfg, &[0.05, 0.9], 50, &tests).unwrap();
        assert_eq!(a.rows.len(), 4);
        assert!(a.rows[..2].iter().all(|r| r.accepted == 50));
        let mut first = Vec::new();
        a.write_csv(&mut first).unwrap();
        let mut second = Vec::new();
        sweep(&cfg, &[0.05, 0.9], 50, &tests).unwrap().write_csv(&mut second).unwrap();
        assert_eq!(first, second);
        assert!(String::from_utf8(first).unwrap().starts_with("util,test,accepted,total,ratio\n0.05,window,50,50,1.000000\n"));
    }
}
