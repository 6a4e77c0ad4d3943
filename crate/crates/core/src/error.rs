use thiserror::Error;

/// Errors produced by the operator, metric and harness layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is singular")]
    Singular,

    #[error("matrix is not expansive: eigenvalue modulus {modulus} <= 1")]
    NotExpansive { modulus: f64 },

    #[error("matrix must be square and non-empty, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("quadrature failed to reach {target:e} (estimate {estimate:e}) in {context}")]
    QuadratureFailure {
        context: String,
        target: f64,
        estimate: f64,
    },

    #[error("test function `{function}` has no derivative closure for multi-index {beta:?}")]
    DerivativeUnavailable { function: String, beta: Vec<u32> },

    #[error("unsupported matrix: {0}")]
    UnsupportedMatrix(String),

    #[error("unsupported input: {0}")]
    UnsupportedInput(String),

    #[error("periodization does not converge: {0}")]
    NonSummableDecay(String),

    #[error("value at index {index} is not positive ({value})")]
    NonPositiveValue { index: usize, value: f64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
