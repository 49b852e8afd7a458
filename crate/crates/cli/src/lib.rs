//! Command-line driver: config loading, commands, reports and golden files.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

use difs_core::construction::ConstructionError;
use difs_core::verification::VerifyError;

pub mod commands;
pub mod config;
pub mod grid;
pub mod output;

pub use config::{ConfigError, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "difs", version, about = "Construct and certify Dirichlet-improvable Liouville vectors on IFS attractors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; reports go to stdout without it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Construction depth (defaults to the config, then the length of M).
    #[arg(long, global = true)]
    pub kmax: Option<usize>,
    /// Largest Q for a decade grid.
    #[arg(long = "Qmax", global = true)]
    pub q_max: Option<String>,
    /// Q grid: "critical", or comma-separated terms such as 1000, 10^4, 10^1..10^5.
    #[arg(long, global = true)]
    pub grid: Option<String>,
    /// Worker threads for parallel scans and row construction.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Level k for scan and theta.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Dimension for demo-diagonal.
    #[arg(long, global = true)]
    pub m: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Check the pair and report N, ell and q(0).
    Validate,
    /// Emit the approximant table as CSV.
    Construct,
    /// Run every exact check and emit a JSON report.
    Verify,
    /// Witness ratios at level k, or scan minima over a Q grid.
    Theta,
    /// Full lower-bound scan below P*_k.
    Scan,
    /// Liouville witnesses and exponents.
    Liouville,
    /// Slope fit of log D(Q) against log Q.
    Omega,
    /// Dirichlet-solvability demo on a diagonal vector.
    DemoDiagonal,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Config(ConfigError),
    Construction(ConstructionError),
    Verify(VerifyError),
    /// A check or golden comparison failed.
    Check(String),
    Io(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<ConstructionError> for CliError {
    fn from(e: ConstructionError) -> Self {
        CliError::Construction(e)
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Construction(c) => CliError::Construction(c),
            other => CliError::Verify(other),
        }
    }
}

impl CliError {
    /// 1 usage or config, 2 degenerate input, 3 failed check, 4 budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Construction(e) => match e {
                ConstructionError::Degenerate => 2,
                ConstructionError::LemmaViolation { .. } => 3,
                ConstructionError::SearchExhausted { .. } | ConstructionError::NeedMoreDepth(_) => 4,
                _ => 1,
            },
            CliError::Verify(e) => match e {
                VerifyError::ExactRationalPoint { .. } => 2,
                VerifyError::InvalidArgument(_) => 1,
                VerifyError::Construction(_) => 1,
                _ => 4,
            },
            CliError::Check(_) => 3,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let (kind, message) = match self {
            CliError::Usage(m) => ("usage", m.clone()),
            CliError::Config(e) => {
                return json!({"error": "config", "path": e.path, "message": e.message});
            }
            CliError::Construction(e) => ("construction", e.to_string()),
            CliError::Verify(e) => ("verification", e.to_string()),
            CliError::Check(m) => ("check", m.clone()),
            CliError::Io(m) => ("io", m.clone()),
        };
        json!({"error": kind, "message": message})
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(|| commands::dispatch(&cli)),
            Err(e) => Err(CliError::Usage(e.to_string())),
        },
        None => commands::dispatch(&cli),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
