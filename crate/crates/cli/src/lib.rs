//! Command-line front end for `stencilmat`: solve, analyze, sweep, bound and oracle.

pub mod args;
pub mod commands;
pub mod config;
mod output;

use std::path::PathBuf;

pub use args::{Cli, Command, CommandKind, RunArgs};
pub use commands::{
    run, run_analyze, run_bound, run_oracle, run_solve, run_sweep, sweep_errors, SweepCurve,
};
pub use config::{RunConfig, Spacing};

/// Exit status 0: success.
pub const EXIT_OK: i32 = 0;
/// Exit status 1: bad configuration, I/O failure or a failed oracle check.
pub const EXIT_CONFIG: i32 = 1;
/// Exit status 2: the mathematical problem is degenerate (non-unique or singular).
pub const EXIT_DEGENERATE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("degenerate system: {0}")]
    Degenerate(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Degenerate(_) => EXIT_DEGENERATE,
            CliError::Config(_) | CliError::Failed(_) => EXIT_CONFIG,
        }
    }
}

impl From<stencilmat::Error> for CliError {
    fn from(e: stencilmat::Error) -> Self {
        use stencilmat::Error as E;
        match e {
            E::NearSingular { .. } | E::Singular { .. } | E::DegeneratePair { .. } => {
                CliError::Degenerate(e.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

/// What a successful command produced.
#[derive(Debug, Default)]
pub struct Outcome {
    /// Human-readable report for standard output.
    pub report: String,
    pub files: Vec<PathBuf>,
}
