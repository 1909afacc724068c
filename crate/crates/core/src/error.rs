use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {reason}")]
    ParseRow {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("embedding file {path}: {reason}")]
    EmbeddingFile { path: PathBuf, reason: String },

    #[error("no embedding for detection at frame {frame}, index {index}")]
    MissingEmbedding { frame: u32, index: u32 },

    #[error("zero-norm embedding cannot be normalized")]
    ZeroNormEmbedding,

    #[error("embedding contains a non-finite component")]
    NonFiniteEmbedding,

    #[error("embedding dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("appearance history is empty")]
    EmptyHistory,

    #[error("invalid config: {0}")]
    Config(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse_row(
        path: impl Into<PathBuf>,
        line: usize,
        reason: impl Into<String>,
    ) -> Self {
        Error::ParseRow {
            path: path.into(),
            line,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
