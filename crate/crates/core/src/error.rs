use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("length {len} is too short (need at least {min})")]
    TooShort { len: usize, min: usize },

    #[error("level {level} out of range for {levels} levels")]
    LevelOutOfRange { level: usize, levels: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("not enough draws: have {have}, need at least {need}")]
    NotEnoughDraws { have: usize, need: usize },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}: {msg}")]
    Input { path: PathBuf, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error(
        "monte carlo study aborted: {failed} of {total} replicates failed (first error: {first})"
    )]
    StudyAborted {
        failed: usize,
        total: usize,
        first: String,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
