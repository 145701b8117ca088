use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("argument {value} outside [-1, 1]")]
    Domain { value: f64 },

    #[error("unsupported degree {degree} (supported range {min}..={max})")]
    Degree { degree: usize, min: usize, max: usize },

    #[error("Newton iteration for degree {degree} did not converge")]
    NoConvergence { degree: usize },

    #[error("index {index} out of range (limit {limit})")]
    Index { index: usize, limit: usize },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("point {0:?} is not covered by any element")]
    NotCovered(Vec<f64>),

    #[error("point {0:?} lies outside the element")]
    OutsideElement(Vec<f64>),

    #[error("invalid mesh: {0}")]
    Mesh(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid wave set: {0}")]
    Waves(String),

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
