//! Command-line studies over `fracvar-core`. Each study writes a CSV table
//! and a JSON summary; the exit codes are [`EXIT_PASS`], [`EXIT_THRESHOLD`]
//! and [`EXIT_USAGE`].

pub mod config;
pub mod error;
pub mod paths;
pub mod report;
pub mod studies;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{Settings, StudyConfig, StudyKind};
pub use error::{CliError, CliResult};
pub use report::{Bound, Check, Outcome, Table};

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "FRACVAR_THREADS";

/// Every threshold was met.
pub const EXIT_PASS: i32 = 0;
/// At least one threshold failed; the failing metrics go to stderr.
pub const EXIT_THRESHOLD: i32 = 1;
/// Bad arguments, configuration or study parameters.
pub const EXIT_USAGE: i32 = 2;

const DEFAULT_OUT: &str = "fracvar-out";

#[derive(Debug, Parser)]
#[command(
    name = "fracvar",
    version,
    about = "Fractional variational calculus studies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one study and write <study>.csv and <study>.json.
    Run(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Study to run.
    study: StudyKind,
    /// JSON configuration document; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory [default: fracvar-out].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for test-path generation [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Fractional orders, comma separated.
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    /// Powers of the oracle paths, comma separated.
    #[arg(long, value_delimiter = ',')]
    beta: Option<Vec<u32>>,
    /// Placements of the point inside each window, comma separated.
    #[arg(long, value_delimiter = ',')]
    s: Option<Vec<f64>>,
    /// Friction coefficients, comma separated.
    #[arg(long, value_delimiter = ',')]
    gamma: Option<Vec<f64>>,
    /// Recoil coefficients, comma separated.
    #[arg(long, value_delimiter = ',')]
    lambda: Option<Vec<f64>>,
    /// Particle mass.
    #[arg(long)]
    mass: Option<f64>,
    /// Window centre.
    #[arg(long)]
    center: Option<f64>,
    /// Window widths, strictly decreasing.
    #[arg(long, value_delimiter = ',')]
    widths: Option<Vec<f64>>,
    /// Nodes per window (odd).
    #[arg(long)]
    n_points: Option<usize>,
    /// Grid sizes, strictly increasing.
    #[arg(long, value_delimiter = ',')]
    grid_sizes: Option<Vec<usize>>,
}

impl RunArgs {
    fn overrides(&self) -> StudyConfig {
        StudyConfig {
            study: None,
            seed: self.seed,
            out: self.out.clone(),
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
            s: self.s.clone(),
            gamma: self.gamma.clone(),
            lambda: self.lambda.clone(),
            mass: self.mass,
            center: self.center,
            widths: self.widths.clone(),
            n_points: self.n_points,
            grid_sizes: self.grid_sizes.clone(),
        }
    }
}

/// Parse a thread cap; `None` or an empty value leaves rayon's default.
pub fn parse_threads(value: Option<&str>) -> CliResult<Option<usize>> {
    match value.map(str::trim) {
        None | Some("") => Ok(None),
        Some(v) => match v.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(error::usage(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
    }
}

/// Run a study on a dedicated pool of `threads` workers (rayon's default
/// when `None`). Results do not depend on the worker count.
pub fn run_study(settings: &Settings, threads: Option<usize>) -> CliResult<Outcome> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| error::usage(format!("cannot start worker pool: {e}")))?;
    pool.install(|| studies::run(settings))
}

/// Full command-line entry. Returns the exit code once reports are written;
/// messages go to stdout and stderr.
pub fn main_with(args: impl IntoIterator<Item = OsString>, threads: Option<&str>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let Command::Run(run) = cli.command;
    match execute(&run, threads) {
        Ok(outcome) => {
            for check in &outcome.checks {
                println!("{check}");
            }
            let failures: Vec<&Check> = outcome.failures().collect();
            if failures.is_empty() {
                EXIT_PASS
            } else {
                for f in failures {
                    eprintln!(
                        "threshold failed: {} = {} (required {})",
                        f.metric,
                        report::number(f.value),
                        f.bound
                    );
                }
                EXIT_THRESHOLD
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn execute(run: &RunArgs, threads: Option<&str>) -> CliResult<Outcome> {
    let threads = parse_threads(threads)?;
    let file = match &run.config {
        Some(path) => StudyConfig::from_file(path)?,
        None => StudyConfig::default(),
    };
    let merged = run.overrides().over(file);
    let out = merged
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let settings = merged.resolve(run.study)?;
    let outcome = run_study(&settings, threads)?;
    let (csv, json) = outcome.write(&out)?;
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(outcome)
}
