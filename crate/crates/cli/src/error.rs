//! Error type for the command-line layer with a fixed exit-code mapping.

use std::path::PathBuf;
use thiserror::Error;

/// Anything that can abort a command. Each variant maps to one process exit
/// code so batch pipelines can branch on the status alone.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable, unparseable, or invalid configuration. Exit code 2.
    #[error("config error: {0}")]
    Config(String),

    /// The solver lost positivity of the specific volume mid-run. Partial
    /// outputs and a failure record are left in the output directory.
    /// Exit code 3.
    #[error("positivity failure at t = {time:.12e}")]
    Positivity { time: f64 },

    /// A verification campaign ran to completion and rejected the claim it
    /// was checking. Exit code 4.
    #[error("verification failed: {0}")]
    Verification(String),

    /// File system trouble, reported with the offending path. Exit code 1.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A numerical routine failed outside the positivity pathway. Exit
    /// code 1.
    #[error("numerics error: {0}")]
    Numerics(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Positivity { .. } => 3,
            CliError::Verification(_) => 4,
            CliError::Io { .. } | CliError::Numerics(_) => 1,
        }
    }

    /// Wrap an i/o error with its path.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

/// Core errors that surface while a command is running (as opposed to while
/// validating its configuration) are numerics failures.
impl From<rarewave_core::Error> for CliError {
    fn from(e: rarewave_core::Error) -> Self {
        CliError::Numerics(e.to_string())
    }
}
