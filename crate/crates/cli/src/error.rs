//! CLI error taxonomy with stable, machine-readable categories.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Memory(String),
    #[error(transparent)]
    Compute(#[from] spinqpt::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Stable category string emitted on stderr for scripting.
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Memory(_) => "memory-budget",
            CliError::Compute(_) => "compute",
            CliError::Io(_) => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Memory(_) => 3,
            CliError::Compute(_) => 4,
            CliError::Io(_) => 5,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
