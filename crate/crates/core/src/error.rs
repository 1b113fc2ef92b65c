use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed manifest: {0}")]
    Manifest(String),

    #[error("no segments")]
    NoSegments,

    #[error("blob length mismatch: {0}")]
    BlobLength(String),

    #[error("non-finite value in segment {segment} at element {index}")]
    NonFinite { segment: String, index: usize },

    #[error("segment {0} has zero l1 norm; mark it skip to pass it through")]
    ZeroNorm(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid container: {0}")]
    Container(String),

    #[error("truncated payload while reading record {record}")]
    Truncated { record: u64 },

    #[error("corrupt stream at record {record}: {reason}")]
    Corrupt { record: u64, reason: String },

    #[error("unexpected end of bit stream")]
    EndOfStream,

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
