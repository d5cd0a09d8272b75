use std::path::{Path, PathBuf};

use budgeted_efx::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const USAGE: u8 = 1;
    pub const GUARANTEE_VIOLATED: u8 = 2;
    pub const SEARCH_CAP: u8 = 3;
    pub const PREDICATE_FAILED: u8 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    /// Prefixes a parse location with the file it came from.
    pub fn in_file(self, path: &Path) -> Self {
        match self {
            CliError::Parse { location, message } => {
                CliError::Parse { location: format!("{}: {location}", path.display()), message }
            }
            other => other,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::SearchBudgetExhausted(_)) => exit::SEARCH_CAP,
            CliError::Core(Error::ExistenceViolation { .. } | Error::Invariant(_)) => exit::GUARANTEE_VIOLATED,
            _ => exit::USAGE,
        }
    }
}
