use std::path::PathBuf;

use plyap_core::Error as CoreError;

/// Everything the runner can fail with, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{path}: {field}: {reason}")]
    Config { path: String, field: String, reason: String },

    #[error("{path}: {reason}")]
    Data { path: String, reason: String },

    #[error("{path}: {source}")]
    Numerical { path: String, source: CoreError },

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl RunError {
    pub fn config(path: impl Into<String>, field: impl Into<String>, reason: impl Into<String>) -> Self {
        RunError::Config { path: path.into(), field: field.into(), reason: reason.into() }
    }

    /// Routes a module error to the right exit category.
    pub fn from_core(path: impl Into<String>, err: CoreError) -> Self {
        let path = path.into();
        match err {
            CoreError::Data { row, reason } => RunError::Data { path, reason: format!("line {row}: {reason}") },
            CoreError::InsufficientData(reason) => RunError::Data { path, reason },
            CoreError::Domain(reason) | CoreError::UnsupportedMap(reason) | CoreError::GeometryMismatch(reason) => {
                RunError::Config { path, field: "system".into(), reason }
            }
            other => RunError::Numerical { path, source: other },
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config { .. } => 2,
            RunError::Data { .. } => 3,
            RunError::Numerical { .. } => 4,
            RunError::Io { .. } => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, RunError>;
