//! Errors of the front end and their exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] oscsum::Error),
    /// Bad arguments, unreadable inputs or an invalid configuration.
    #[error("usage error: {0}")]
    Usage(String),
    /// The report could not be written.
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    /// 2 usage, 3 budget, 4 precondition, 5 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => e.exit_code(),
            CliError::Usage(_) => 2,
            CliError::Output(_) => 5,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
