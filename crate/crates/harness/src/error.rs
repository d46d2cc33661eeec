use std::path::PathBuf;

use thiserror::Error;

use crate::qasm::QasmError;

/// Harness failure, classified by process exit code.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("runtime failure: {0}")]
    Runtime(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Qasm(#[from] QasmError),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Capacity(_) => 3,
            HarnessError::Runtime(_) | HarnessError::Io { .. } | HarnessError::Qasm(_) => 4,
        }
    }

    /// Classify a core error raised while validating inputs.
    pub fn from_setup(e: treeprep_core::Error) -> Self {
        if e.is_capacity() {
            HarnessError::Capacity(e.to_string())
        } else {
            HarnessError::Config(e.to_string())
        }
    }

    /// Classify a core error raised after evaluation started.
    pub fn from_run(e: treeprep_core::Error) -> Self {
        if e.is_capacity() {
            HarnessError::Capacity(e.to_string())
        } else {
            HarnessError::Runtime(e.to_string())
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
