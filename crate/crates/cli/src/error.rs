//! Errors of the command-line front end and their exit statuses.

use epf_core::{EpfError, ErrorClass};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}:{line}: {reason}")]
    Config { path: String, line: usize, reason: String },

    #[error("{count} model(s) failed: {ids}")]
    ModelsFailed { count: usize, ids: String },

    #[error(transparent)]
    Core(#[from] EpfError),
}

impl CliError {
    /// 1 usage, 2 data error, 3 numerical failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config { .. } => 1,
            CliError::ModelsFailed { .. } => 3,
            CliError::Core(e) => match e.class() {
                ErrorClass::Usage => 1,
                ErrorClass::Data => 2,
                ErrorClass::Numerical => 3,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
