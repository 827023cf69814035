//! Benchmark objectives on the Stiefel manifold.
//!
//! Every objective exposes its loss and Euclidean gradient; the Riemannian
//! gradient is obtained by tangent projection. Instances are built around a
//! planted solution so that the optimum is known without any spectral
//! factorisation.

pub mod adapter;
pub mod fdcheck;
pub mod procrustes;
pub mod subspace;
pub mod toynet;

pub use adapter::{from_internal, to_internal};
pub use fdcheck::{directional_error, fd_check, FdReport, ScaledGradient};
pub use procrustes::{make_procrustes, Procrustes};
pub use subspace::{default_spectrum, make_subspace, Subspace};
pub use toynet::{make_toynet, ToyNet, ToyNetConfig, ToyStep, ToyWeights, TrainingSetup};

use crate::error::Result;
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::stiefel::{tangent_project, StiefelPoint};

/// A smooth objective `f: 𝔽^{n×p} → ℝ`.
///
/// `grad` returns the Euclidean gradient in the sense of the real inner
/// product: `d/dt f(X + tV)|₀ = Re tr(Vᴴ ∇f(X))`.
pub trait Objective<T: Scalar> {
    fn name(&self) -> &str;

    /// `(n, p)` of the optimization variable.
    fn dims(&self) -> (usize, usize);

    fn loss(&self, x: &Matrix<T>) -> Result<f64>;

    fn grad(&self, x: &Matrix<T>) -> Result<Matrix<T>>;

    /// Known global minimum, if any.
    fn optimum(&self) -> Option<f64> {
        None
    }

    /// Known minimizer, if any.
    fn planted(&self) -> Option<&StiefelPoint<T>> {
        None
    }

    /// `π_{T_X}(∇f(X))`
    fn riemannian_grad(&self, x: &StiefelPoint<T>) -> Result<Matrix<T>> {
        Ok(tangent_project(x, &self.grad(x.matrix())?)?.into_matrix())
    }
}

/// `Z − X·(XᴴZ + ZᴴX)/2`, the tangent projection written without `W`.
///
/// Unlike [`tangent_project`] this accepts matrices that have drifted off the
/// manifold, which is what the unconstrained baselines need for reporting.
pub fn project_unchecked<T: Scalar>(x: &Matrix<T>, z: &Matrix<T>) -> Result<Matrix<T>> {
    let a = x.adjoint_mul(z)?;
    let p = a.rows();
    let sym = Matrix::from_fn(p, p, |i, j| (a[(i, j)] + a[(j, i)].conj()).scale(0.5));
    z.sub(&x.matmul(&sym)?)
}
