use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: `{field}` {reason}")]
    Validation { field: String, reason: String },

    #[error("cannot parse config: {0}")]
    Parse(String),

    /// Two artifacts that cannot be combined (hash or horizon mismatch).
    #[error("{0}")]
    Incompatible(String),

    #[error(transparent)]
    Core(#[from] varqd_core::Error),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("malformed artifact {}: {reason}", path.display())]
    Artifact { path: PathBuf, reason: String },
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn artifact(path: &Path, reason: impl Into<String>) -> Self {
        CliError::Artifact {
            path: path.to_path_buf(),
            reason: reason.into(),
        }
    }

    /// 2 for bad input, 3 for numerical failure, 1 for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation { .. } | CliError::Parse(_) | CliError::Incompatible(_) => 2,
            CliError::Core(e) if e.is_validation() => 2,
            CliError::Core(_) => 3,
            CliError::Io { .. } | CliError::Artifact { .. } => 1,
        }
    }
}

pub(crate) trait IoContext<T> {
    fn at(self, path: &Path) -> Result<T>;
}

impl<T> IoContext<T> for io::Result<T> {
    fn at(self, path: &Path) -> Result<T> {
        self.map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}
