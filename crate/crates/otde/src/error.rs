//! Crate-wide error type.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed dataset: {0}")]
    MalformedDataset(String),

    #[error("unknown class label token `{0}`")]
    UnknownLabel(String),

    #[error("degenerate range: all values are equal")]
    DegenerateRange,

    #[error("thresholds must be strictly ascending")]
    InvalidThresholds,

    #[error("insufficient history: need at least {needed} prices, got {got}")]
    InsufficientHistory { needed: usize, got: usize },

    #[error("invalid price {price} at position {index}: prices must be positive")]
    InvalidPrice { price: f64, index: usize },

    #[error("window length {window} exceeds series length {series_length}")]
    WindowTooLong { window: usize, series_length: usize },

    #[error("2c = {requested} coefficient values exceed window length {window}")]
    TooManyCoefficients { requested: usize, window: usize },

    #[error("cannot fit bins on an empty column")]
    EmptyColumn,

    #[error("need at least 2 training instances, got {0}")]
    NotEnoughData(usize),

    #[error("configuration falls outside the parameter space")]
    OutOfSpace,

    #[error("kernel matrix is singular even after jitter escalation")]
    SingularKernel,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("label {label} out of range for {num_classes} classes")]
    LabelOutOfRange { label: usize, num_classes: usize },

    #[error("need at least {min} non-zero paired differences, got {got}")]
    TooFewPairs { min: usize, got: usize },

    #[error("missing value for method `{method}` on dataset `{dataset}`")]
    IncompleteGrid { method: String, dataset: String },

    #[error("shape mismatch: expected {expected_dims}x{expected_len}, got {got_dims}x{got_len}")]
    ShapeMismatch {
        expected_dims: usize,
        expected_len: usize,
        got_dims: usize,
        got_len: usize,
    },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("model file is not valid: {0}")]
    InvalidModel(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidModel(e.to_string())
    }
}
