//! Crate-wide error type.
//!
//! Variants are grouped by how callers should react: everything except
//! [`Error::DataShape`] is an input, configuration, or resource problem,
//! while `DataShape` means the inputs were readable but too degenerate to
//! process (dataset below minimum size, single-class training split, ...).

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed file contents (duplicate vocab line, non-alphabetic affix, ...).
    #[error("format error: {0}")]
    Format(String),

    /// Inputs that parse but violate a cross-resource contract, e.g. an affix
    /// missing from the vocabulary or a token that cannot be serialized.
    #[error("validation error: {0}")]
    Validation(String),

    /// Bad configuration or argument combinations.
    #[error("config error: {0}")]
    Config(String),

    /// Structurally degenerate data: too few words, single-class split, ...
    #[error("data error: {0}")]
    DataShape(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
