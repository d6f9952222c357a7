//! Command-line front end for the `casimir-modes` library: configuration
//! parsing, preset selection, grid scans, deterministic CSV/JSON emission,
//! and the verification suite runner.

pub mod commands;
pub mod config;
pub mod table;
pub mod verify;

/// Process exit codes: 0 success, 2 usage/configuration, 3 numerical.
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Failure classified by which exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad config file, or an operation the configuration does
    /// not support. Exit code 2.
    Usage(anyhow::Error),
    /// The configuration was valid but a computation failed. Exit code 3.
    Numerical(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => EXIT_USAGE,
            Self::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    pub fn message(&self) -> &anyhow::Error {
        match self {
            Self::Usage(e) | Self::Numerical(e) => e,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
