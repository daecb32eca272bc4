use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("domain error: {0}")]
    Domain(String),

    /// A comparison could not be decided at the available precision.
    #[error("undecidable at precision {prec} bits: {what}")]
    Undecidable { what: String, prec: u32 },

    #[error("index out of range: {0}")]
    Index(String),

    #[error("range of {len} terms exceeds capacity {cap}")]
    Capacity { len: u64, cap: u64 },

    #[error("parity error: {0}")]
    Parity(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("corrupt checkpoint {path}: {reason}")]
    CorruptCheckpoint { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn undecidable(what: impl Into<String>, prec: u32) -> Self {
        Error::Undecidable {
            what: what.into(),
            prec,
        }
    }

    pub fn is_undecidable(&self) -> bool {
        matches!(self, Error::Undecidable { .. })
    }
}
