use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Result not representable as a normal `f64`.
    #[error("range error: {0}")]
    Range(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// Point lies on a dividing line of a region partition.
    #[error("point ({x}, {y}) lies on a region boundary")]
    Boundary { x: f64, y: f64 },
    #[error("point outside support: {0}")]
    OutsideSupport(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("case is not a fixed point of its transformation")]
    NotFixedPoint,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
}
