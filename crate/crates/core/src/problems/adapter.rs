//! Row-orthonormal weights.
//!
//! A layer weight `K` of shape `p × n` with `p ≤ n` and `KKᴴ = I_p` (for
//! example a convolution kernel flattened to `c_out × (c_in·h·w)`) is stored
//! internally as its transpose, an `n × p` matrix with orthonormal columns.
//! Plain (unconjugated) transposition keeps the round trip bit-exact.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::stiefel::StiefelPoint;

/// `Kᵀ` as a Stiefel point; fails if `p > n` or `‖KKᴴ − I‖_F > ortho_tol`.
pub fn to_internal<T: Scalar>(k: &Matrix<T>, ortho_tol: f64) -> Result<StiefelPoint<T>> {
    if k.rows() > k.cols() {
        return Err(Error::InvalidArgument("row-orthonormal weights need p <= n"));
    }
    StiefelPoint::with_tol(k.transpose(), ortho_tol)
}

pub fn from_internal<T: Scalar>(x: &StiefelPoint<T>) -> Matrix<T> {
    x.matrix().transpose()
}
