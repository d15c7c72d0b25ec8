use thiserror::Error;

/// Errors raised by the model, sampler, generator and experiment layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} must lie in {range}, got {value}")]
    Domain {
        what: &'static str,
        range: &'static str,
        value: f64,
    },

    #[error("degenerate counts: {0}")]
    DegenerateCounts(String),

    #[error("dimension mismatch: expected {expected} columns, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("insufficient presences: need {needed}, population has {available}")]
    InsufficientPresences { needed: usize, available: usize },

    #[error("not enough results: need at least {needed}, got {found}")]
    NotEnoughResults { needed: usize, found: usize },

    #[error("cell {cell}: {source}")]
    Cell {
        cell: String,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(what: &'static str, range: &'static str, value: f64) -> Error {
    Error::Domain { what, range, value }
}
