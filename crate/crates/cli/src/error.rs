use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] gpscat::Error),

    #[error("{0}")]
    Usage(String),

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{failed} of {total} validation checks did not pass")]
    ValidationFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Usage(_) => "Usage",
            CliError::Io { .. } => "Io",
            CliError::ValidationFailed { .. } => "ValidationFailed",
        }
    }

    /// 1 for failed validation, 2 for everything that stopped the run.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::ValidationFailed { .. } => 1,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
