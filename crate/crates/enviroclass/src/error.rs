//! Crate-wide error type.
//!
//! Every error carries a stable category string so the CLI can emit
//! machine-parseable `error:<category>:` lines.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A mapped column is absent from a CSV header.
    #[error("{dataset} dataset is missing required column `{column}`")]
    Schema { dataset: String, column: String },

    /// An operation received input outside its contract.
    #[error("{0}")]
    Domain(String),

    /// Aligned data structures disagree (e.g. a row's state has no water index).
    #[error("{0}")]
    Consistency(String),

    /// Air and water datasets share no state keys.
    #[error("air and water datasets share no states; nothing to join")]
    NoOverlap,

    /// Pearson correlation is undefined for constant input.
    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    /// Bad configuration file or value.
    #[error("{0}")]
    Config(String),

    /// Unreadable or unsupported model file.
    #[error("{0}")]
    ModelFormat(String),

    /// I/O failure tagged with the path involved.
    #[error("{path}: {source}")]
    IoAt {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn io_at(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::IoAt {
            path: path.display().to_string(),
            source,
        }
    }

    /// Stable category slug used in the CLI's `error:<category>:` prefix.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Schema { .. } => "schema",
            Error::Domain(_) => "domain",
            Error::Consistency(_) => "consistency",
            Error::NoOverlap => "no-overlap",
            Error::UndefinedCorrelation(_) => "domain",
            Error::Config(_) => "config",
            Error::ModelFormat(_) => "model-format",
            Error::IoAt { .. } | Error::Io(_) | Error::Csv(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
