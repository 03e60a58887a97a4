//! Library half of the `peakshave` command-line tool: CSV ingest, run
//! configuration, command implementations and report emission. The binary
//! in `main.rs` is a thin clap wrapper so everything here stays testable.

pub mod commands;
pub mod ingest;
pub mod report;
pub mod run_config;

use thiserror::Error;

/// CLI-level errors carry the process exit code: 2 for validation
/// problems (bad files, bad config, bad data), 3 for solver failures.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("solver: {0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Solver(_) => 3,
        }
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }
}

impl From<peakshave::Error> for CliError {
    fn from(e: peakshave::Error) -> Self {
        match e {
            peakshave::Error::InvalidInput(m) => CliError::Validation(m),
            other => CliError::Solver(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
