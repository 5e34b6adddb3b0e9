use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use k2q::oracles::DEFAULT_HORIZON_CAP;
use k2q::task::assign_priorities;
use k2q::workload::GenConfig;
use k2q::{parse_taskset, PriorityPolicy};
use k2q_cli::analyze::{analyze, render_text};
use k2q_cli::selection::parse_tests;
use k2q_cli::sweep::{parse_grid, sweep};
use k2q_cli::verify::{parse_suites, verify};
use k2q_cli::CliError;

/// Schedulability analysis for fixed-priority real-time task sets.
#[derive(Parser)]
#[command(name = "k2q", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the selected tests on every task of a task-set file.
    Analyze {
        file: PathBuf,
        /// Comma-separated tests, or `all`.
        #[arg(long)]
        tests: Option<String>,
        /// Priority order; `given` keeps the file order.
        #[arg(long, default_value = "given")]
        policy: String,
        /// Longest simulated horizon for multiprocessor sets.
        #[arg(long, default_value_t = DEFAULT_HORIZON_CAP)]
        horizon_cap: u64,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Acceptance ratio per test over a utilization grid, as CSV.
    Sweep {
        /// Generator configuration (JSON); flags below override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        processors: Option<usize>,
        /// `min:max` period range.
        #[arg(long)]
        periods: Option<String>,
        /// `min:max` range of D/T.
        #[arg(long)]
        deadline_ratio: Option<String>,
        /// Round periods and execution times to integers.
        #[arg(long)]
        integer: bool,
        #[arg(long)]
        policy: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Total utilization grid: `start:stop:step` or a comma list.
        #[arg(long, default_value = "0.1:1.0:0.1")]
        util_grid: String,
        #[arg(long, default_value_t = 500)]
        trials: u64,
        #[arg(long)]
        tests: Option<String>,
        /// CSV path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run verification suites against the exact oracles.
    Verify {
        /// Comma-separated suites, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Cases per suite; each suite has its own default.
        #[arg(long)]
        count: Option<u64>,
        #[arg(long)]
        json: bool,
    },
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn range(spec: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Input(format!("bad range `{spec}`, expected min:max"));
    let (a, b) = spec.split_once(':').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn policy(spec: &str) -> Result<PriorityPolicy, CliError> {
    Ok(spec.parse::<PriorityPolicy>()?)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let stdout = io::stdout();
    match cli.command {
        Command::Analyze { file, tests, policy: p, horizon_cap, json } => {
            let ts = assign_priorities(&parse_taskset(&read(&file)?)?, policy(&p)?);
            let tests = parse_tests(tests.as_deref(), ts.processors())?;
            let report = analyze(&ts, &tests, horizon_cap)?;
            let text = if json {
                serde_json::to_string_pretty(&report).map_err(|e| CliError::Input(e.to_string()))? + "\n"
            } else {
                render_text(&report)
            };
            stdout.lock().write_all(text.as_bytes())?;
        }
        Command::Sweep {
            config,
            n,
            processors,
            periods,
            deadline_ratio,
            integer,
            policy: p,
            seed,
            util_grid,
            trials,
            tests,
            out,
        } => {
            let grid = parse_grid(&util_grid)?;
            let mut cfg = match config {
                Some(path) => {
                    let mut doc: serde_json::Value = serde_json::from_str(&read(&path)?)
                        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                    // The grid supplies the utilization; the file need not.
                    if let Some(obj) = doc.as_object_mut() {
                        obj.entry("total_util").or_insert(grid[0].into());
                    }
                    serde_json::from_value::<GenConfig>(doc)
                        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
                }
                None => GenConfig::new(10, grid[0]),
            };
            if let Some(n) = n {
                cfg.n = n;
            }
            if let Some(m) = processors {
                cfg.processors = m;
            }
            if let Some(r) = periods {
                cfg.period_range = range(&r)?;
            }
            if let Some(r) = deadline_ratio {
                cfg.deadline_ratio_range = range(&r)?;
            }
            cfg.integer_mode |= integer;
            if let Some(p) = p {
                cfg.policy = policy(&p)?;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let tests = parse_tests(tests.as_deref(), cfg.processors)?;
            let result = sweep(&cfg, &grid, trials, &tests)?;
            match out {
                Some(path) => {
                    let file = fs::File::create(&path)
                        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                    result.write_csv(io::BufWriter::new(file))?;
                }
                None => result.write_csv(stdout.lock())?,
            }
        }
        Command::Verify { suite, seed, count, json } => {
            let suites = parse_suites(&suite)?;
            let (reports, outcome) = verify(&suites, seed, count);
            let mut w = stdout.lock();
            if json {
                let text = serde_json::to_string_pretty(&reports).map_err(|e| CliError::Input(e.to_string()))?;
                writeln!(w, "{text}")?;
            } else {
                for r in &reports {
                    write!(w, "{r}")?;
                }
            }
            return outcome;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("k2q: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
