use std::path::PathBuf;

use thiserror::Error;

use crate::ingest::CountryCode;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("cannot read {path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("country table line {line}: {reason}")]
    CountryTable { line: usize, reason: String },

    #[error("duplicate country code {code} with conflicting entries")]
    DuplicateCode { code: CountryCode },

    #[error("negative GDP for {code} in {year}")]
    NegativeGdp { code: CountryCode, year: i32 },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("undefined indicator: {reason}")]
    Undefined { reason: String, anomaly: Option<String> },

    #[error("{format} parse error: {reason}")]
    Import { format: &'static str, reason: String },
}

impl Error {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn undefined(reason: impl Into<String>) -> Self {
        Error::Undefined { reason: reason.into(), anomaly: None }
    }
}
