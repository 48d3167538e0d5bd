use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BionError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// Malformed document; `pointer` is a JSON pointer to the offending
    /// field (empty for the document root).
    #[error("{path}: parse error at '{pointer}': {message}")]
    Parse { path: PathBuf, pointer: String, message: String },
    #[error("{path}: unsupported format_version {found}, expected {expected}")]
    Version { path: PathBuf, found: u64, expected: u64 },
    #[error("{path}: {source}")]
    Invalid {
        path: PathBuf,
        #[source]
        source: bion_core::Error,
    },
    #[error(transparent)]
    Core(#[from] bion_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("csv: {0}")]
    Csv(String),
}

impl BionError {
    /// 2 for operating-system I/O failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            BionError::Io { .. } => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        BionError::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, pointer: impl Into<String>, message: impl Into<String>) -> Self {
        BionError::Parse { path: path.into(), pointer: pointer.into(), message: message.into() }
    }
}

impl From<csv::Error> for BionError {
    fn from(e: csv::Error) -> Self {
        BionError::Csv(e.to_string())
    }
}

pub type Result<T, E = BionError> = std::result::Result<T, E>;
