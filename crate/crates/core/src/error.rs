use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library. Solver failures are not errors: they are
/// reported as [`crate::solvers::RunStatus::NoResult`] so that scoring can
/// continue.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InputDomain(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("scoring error at n={n}: {message}")]
    Scoring { n: usize, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("oracle table error: {0}")]
    Oracle(String),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn input(message: impl Into<String>) -> Self {
        Error::InputDomain(message.into())
    }

    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Error::Config(message.into())
    }

    pub fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
