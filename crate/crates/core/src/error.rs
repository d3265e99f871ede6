use thiserror::Error;

/// Errors raised by the numerics library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("resource limit: {what} needs {requested} entries, cap is {cap}")]
    ResourceLimit {
        what: String,
        requested: u128,
        cap: usize,
    },

    #[error("exact arithmetic overflow: {0}")]
    Overflow(String),

    #[error("support violation at index {index}: {detail}")]
    Support { index: usize, detail: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("undefined conversion rate: {0}")]
    UndefinedRate(String),

    #[error("copy lower bound diverges: catalyst state is uniform")]
    InfiniteCopies,

    #[error("channel is not Gibbs-preserving: {0}")]
    NotGibbsPreserving(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::ResourceLimit { .. } | Error::Overflow(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
