use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("solver failure: {0}")]
    Solver(String),
}

impl BenchError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        BenchError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        BenchError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Process exit code: 1 for configuration problems, 2 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config { .. } => 1,
            BenchError::Io { .. } => 2,
            BenchError::Solver(_) => 1,
        }
    }
}

impl From<csv::Error> for BenchError {
    fn from(e: csv::Error) -> Self {
        let path = PathBuf::from("<csv>");
        match e.into_kind() {
            csv::ErrorKind::Io(source) => BenchError::Io { path, source },
            other => BenchError::Io {
                path,
                source: std::io::Error::other(format!("{other:?}")),
            },
        }
    }
}
