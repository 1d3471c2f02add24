//! `dpbw`: solve, search and verify pool block withholding games from the
//! command line.
//!
//! Exit codes: 0 on success or a passing check, 1 when a verification finds a
//! violation, 2 on usage or input errors.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
pub mod report;
pub mod scenario;
mod sweep;

pub use sweep::{parse_range, SweepParam, SWEEP_FIXED_COLUMNS};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io { path: String, message: String },
    Parse { path: String, message: String },
    Validation { path: String, message: String },
    Solver(dpbw_core::Error),
    Internal(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io { path, message } => write!(f, "cannot access {path}: {message}"),
            CliError::Parse { path, message } => write!(f, "cannot parse {path}: {message}"),
            CliError::Validation { path, message } if path.is_empty() => write!(f, "invalid input: {message}"),
            CliError::Validation { path, message } => write!(f, "invalid input at {path}: {message}"),
            CliError::Solver(e) => write!(f, "{e}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<dpbw_core::Error> for CliError {
    fn from(e: dpbw_core::Error) -> Self {
        CliError::Solver(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum AwardBaseArg {
    /// Award taken from the whole pot (matches the analytic utilities).
    #[default]
    Total,
    /// Award taken from the pool's own blocks only (non-canonical).
    Direct,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Scenario file (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Strategy file; defaults to the scenario's strategy, then the zero profile.
    #[arg(long, global = true)]
    pub strategy: Option<PathBuf>,
    /// Write the machine-readable report here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report format; `sweep` defaults to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Parser)]
#[command(name = "dpbw", version, about = "Pool block withholding games with miner awards")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Direct, infiltration and total rewards plus utilities for a profile.
    Rewards,
    /// One pool's best response to the current profile.
    BestResponse {
        /// Zero-based pool index.
        #[arg(long)]
        pool: usize,
    },
    /// Certified equilibria with PoA and PoS.
    Equilibria {
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Random starts for the search in games with more than two pools.
        #[arg(long, default_value_t = 16)]
        starts: usize,
    },
    /// Numerical checks of the equilibrium results.
    Verify {
        #[command(subcommand)]
        target: VerifyTarget,
    },
    /// Re-run the equilibrium search over a parameter range; one CSV row per value.
    Sweep {
        /// `alpha` (all pools), `alpha_<k>`, `m` or `m_<k>`; `k` is zero-based.
        #[arg(long)]
        param: String,
        /// `start:stop:step`, stop inclusive.
        #[arg(long)]
        range: String,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 16)]
        starts: usize,
    },
    /// Monte Carlo estimate of rewards and utilities, compared with the analytic values.
    Simulate {
        /// Total rounds, split evenly over the epochs.
        #[arg(long, default_value_t = 1_000_000)]
        rounds: u64,
        #[arg(long, default_value_t = 50)]
        epochs: usize,
        #[arg(long, default_value_t = 5)]
        burn_in: usize,
        #[arg(long, value_enum, default_value_t)]
        award_base: AwardBaseArg,
        #[arg(long, default_value_t = 3.0)]
        k_sigma: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyTarget {
    /// Sampled deviations from the zero profile never beat honest mining.
    Theorem1 {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Two pools: the zero profile is the only equilibrium.
    Theorem2 {
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Run even when the preconditions fail; the outcome is reported, not judged.
        #[arg(long)]
        exploratory: bool,
    },
    /// Sign claims on the cleared deviation polynomial.
    Claims {
        #[arg(long, default_value_t = 1000)]
        grid: usize,
    },
    /// The all-or-nothing corner profiles are not equilibria.
    Corners,
    /// The same game with both alphas at 1, where honest mining is not stable.
    Eyal {
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Minimum zero-profile regret required to pass.
        #[arg(long, default_value_t = 1e-4)]
        min_regret: f64,
    },
}

/// What a command produced.
pub struct Outcome {
    pub summary: String,
    /// Report body for `--out`.
    pub report: String,
    pub passed: bool,
}

/// Argument vector echoed into reports: everything except the output path.
fn echo(args: &[OsString]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in args.iter().skip(1) {
        let s = a.to_string_lossy().into_owned();
        if skip {
            skip = false;
            continue;
        }
        if s == "--out" {
            skip = true;
            continue;
        }
        if s.starts_with("--out=") {
            continue;
        }
        out.push(s);
    }
    out
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let out = cli.common.out.clone();
    match commands::dispatch(&cli, echo(&args)) {
        Ok(outcome) => {
            if let Some(path) = out {
                if let Err(e) = report::write_atomic(&path, outcome.report.as_bytes()) {
                    eprintln!("dpbw: {e}");
                    return 2;
                }
            }
            print!("{}", outcome.summary);
            if outcome.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("dpbw: {e}");
            2
        }
    }
}
