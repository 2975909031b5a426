use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A required column or file section is absent.
    #[error("schema error: {0}")]
    Schema(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// A cell could not be read as a number.
    #[error("parse error in {file} at row {row}, column '{column}': {message}")]
    Parse {
        file: String,
        row: usize,
        column: String,
        message: String,
    },

    /// Values are present but violate a physical or structural invariant.
    #[error("data error: {0}")]
    Data(String),

    /// An operation received arguments outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pairing error: {0}")]
    Pairing(String),

    #[error("size error: {0}")]
    Size(String),

    #[error("training diverged at epoch {epoch}, batch {batch}: {message}")]
    Divergence {
        epoch: usize,
        batch: usize,
        message: String,
    },

    #[error("model load error at {location}: {message}")]
    ModelLoad { location: String, message: String },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }
}
