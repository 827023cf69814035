use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{op}: dimension mismatch between {left:?} and {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is singular to working precision (pivot {pivot} at step {step})")]
    SingularMatrix { step: usize, pivot: f64 },
    #[error("column {column} is linearly dependent on the preceding columns")]
    RankDeficient { column: usize },
    #[error("matrix is not orthonormal: error {error:e} exceeds tolerance {tol:e}")]
    NotOrthonormal { error: f64, tol: f64 },
    #[error("gradient contains non-finite entries")]
    NonFiniteGradient,
    #[error("invalid step counter {0}; bias correction needs k >= 1")]
    InvalidStep(u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}
