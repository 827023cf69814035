use alloc::string::String;

use super::Objective;
use crate::error::{Error, Result};
use crate::linalg::Lu;
use crate::matrix::Matrix;
use crate::rng::{gaussian_matrix, Rng};
use crate::scalar::{Field, Scalar};
use crate::stiefel::{random_point, StiefelPoint};

/// `f(X) = ‖AX − B‖²_F` over square orthogonal/unitary `X`, with `B = A·Q`
/// for a planted `Q`. The minimum is 0 at `X = Q`.
///
/// Cayley steps never change the sign of a real determinant, so in the real
/// case `Q` is planted in `SO(n)` and reachable from the identity.
#[derive(Debug, Clone)]
pub struct Procrustes<T> {
    name: String,
    a: Matrix<T>,
    b: Matrix<T>,
    planted: StiefelPoint<T>,
}

pub fn make_procrustes<T: Scalar>(rng: &mut Rng, n: usize) -> Result<Procrustes<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("procrustes needs n >= 1"));
    }
    let a = gaussian_matrix::<T>(rng, n, n);
    let mut q = random_point::<T>(rng, n, n)?.into_matrix();
    if T::FIELD == Field::Real && Lu::factor(&q)?.determinant().re() < 0.0 {
        for i in 0..n {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    let planted = StiefelPoint::new(q)?;
    let b = a.matmul(planted.matrix())?;
    Ok(Procrustes {
        name: alloc::format!("procrustes-{n}"),
        a,
        b,
        planted,
    })
}

impl<T: Scalar> Procrustes<T> {
    pub fn a(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn b(&self) -> &Matrix<T> {
        &self.b
    }

    fn residual(&self, x: &Matrix<T>) -> Result<Matrix<T>> {
        self.a.matmul(x)?.sub(&self.b)
    }
}

impl<T: Scalar> Objective<T> for Procrustes<T> {
    fn name(&self) -> &str {
        &self.name
    }

    fn dims(&self) -> (usize, usize) {
        self.planted.shape()
    }

    fn loss(&self, x: &Matrix<T>) -> Result<f64> {
        Ok(self.residual(x)?.frobenius_norm_sqr())
    }

    /// `2Aᴴ(AX − B)`
    fn grad(&self, x: &Matrix<T>) -> Result<Matrix<T>> {
        Ok(self.a.adjoint_mul(&self.residual(x)?)?.scale(2.0))
    }

    fn optimum(&self) -> Option<f64> {
        Some(0.0)
    }

    fn planted(&self) -> Option<&StiefelPoint<T>> {
        Some(&self.planted)
    }
}
