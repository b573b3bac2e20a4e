use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of a function.
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("empty input")]
    EmptyInput,

    #[error("NaN at index {0}")]
    NanInput(usize),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Every conditional prior predictive value is zero.
    #[error("observed data has zero prior predictive probability")]
    ImpossibleData,

    #[error("unknown cell label `{0}`")]
    UnknownLabel(String),

    #[error("unknown table or scalar set `{0}`")]
    UnknownItem(String),

    #[error("invalid cell set: {0}")]
    InvalidSet(String),

    #[error("invalid direction: {0}")]
    InvalidDirection(String),

    #[error("grid of {size} cells exceeds exhaustive-search limit {max}")]
    GridTooLarge { size: usize, max: usize },

    #[error("observed value {0} is outside the represented support")]
    OutOfSupport(f64),

    #[error("direction changes the marginal prior (total variation {tv:e})")]
    MarginalMismatch { tv: f64 },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    /// A configuration document violates the schema; `path` locates the key.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("numerical failure: {0}")]
    Numeric(String),
}

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        func,
        detail: detail.into(),
    }
}
