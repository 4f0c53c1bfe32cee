use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside its documented domain.
    #[error("input error: {0}")]
    Input(String),
    /// A function does not have the shape an operation requires (convexity, normality).
    #[error("shape error: {0}")]
    Shape(String),
    /// An operator descriptor could not be assembled.
    #[error("construction error: {0}")]
    Construction(String),
    #[error("unsupported operator: {0}")]
    UnsupportedOperator(String),
    /// The operator pair does not satisfy the precondition of the requested algorithm.
    #[error("classification error: {0}")]
    Classification(String),
    #[error("degenerate output: {0}")]
    DegenerateOutput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
