use thiserror::Error;

/// Errors raised by the curvature toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not orthogonal (|QᵀQ - I| = {defect:e})")]
    NotOrthogonal { defect: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("degenerate plane (Gram determinant {gram:e})")]
    DegeneratePlane { gram: f64 },

    #[error("invalid fundamental data: {0}")]
    InvalidData(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("degenerate immersion: {0}")]
    DegenerateImmersion(String),

    #[error("unknown name: {0}")]
    UnknownName(String),
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;
