use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] symmflow_core::Error),

    #[error("I/O failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unknown problem `{problem}` for space {space}")]
    UnknownProblem { space: String, problem: String },

    #[error("invalid problem specification: {0}")]
    InvalidSpec(String),

    #[error("no reference solution available: {0}")]
    ReferenceUnavailable(String),

    #[error("invalid convergence study: {0}")]
    InvalidStudy(String),

    #[error("configuration error: {0}")]
    Config(String),
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }
}
