use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{what} parse error at byte {offset}: {message}")]
    MalformedRecord {
        what: &'static str,
        offset: usize,
        message: String,
    },

    #[error("{what} parse error at line {line}: {message}")]
    Parse {
        what: &'static str,
        line: usize,
        message: String,
    },

    #[error("invalid parameter {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("missing score for {0}")]
    MissingScore(String),

    #[error("all edge weights are zero")]
    ZeroWeights,

    #[error("illegal algorithm {requested}; legal combinations: {legal}")]
    IllegalCombination { requested: String, legal: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
