use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the matrix, Green's function and bound routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GreenError {
    #[error("matrix is not upper triangular: |a[{row}][{col}]| = {magnitude:e} exceeds tolerance {tolerance:e}")]
    NotTriangular {
        row: usize,
        col: usize,
        magnitude: f64,
        tolerance: f64,
    },

    #[error("matrix is not strictly upper triangular: entry ({row}, {col}) is nonzero")]
    NotStrictlyTriangular { row: usize, col: usize },

    #[error("{routine} did not converge (index {index})")]
    ConvergenceFailure { routine: &'static str, index: usize },

    #[error("eigenvalue {eigenvalue} lies on the imaginary axis; the bounded-solutions problem is ill-posed")]
    SpectrumOnAxis { eigenvalue: Complex64 },

    #[error("iterate became numerically singular in {routine}")]
    SingularIteration { routine: &'static str },

    #[error("Green's function is undefined at t = 0")]
    UndefinedAtZero,

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("bound is inapplicable: {0}")]
    Inapplicable(String),

    #[error("contour node {node} is too close to an eigenvalue")]
    SingularResolvent { node: Complex64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
}

pub type Result<T> = std::result::Result<T, GreenError>;
