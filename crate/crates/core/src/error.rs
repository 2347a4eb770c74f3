use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid UTF-8 at byte offset {offset}")]
    Encoding { offset: usize },

    #[error("vocabulary is empty (no token reaches min_count)")]
    EmptyVocabulary,

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("dimension {d} out of range 1..={max}")]
    DimensionOutOfRange { d: usize, max: usize },

    #[error("undefined similarity: zero vector")]
    ZeroVector,

    #[error("undefined correlation: zero rank variance")]
    ZeroRankVariance,

    #[error("insufficient coverage: {covered} items evaluated, need at least {needed}")]
    InsufficientCoverage { covered: usize, needed: usize },

    #[error("degenerate model: {0}")]
    Degenerate(String),

    #[error("training diverged at epoch {epoch}: {message}")]
    Diverged { epoch: usize, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
