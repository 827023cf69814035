//! Finite-difference gradient checks along Cayley curves.

use super::Objective;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::{gaussian_matrix, Rng};
use crate::scalar::Scalar;
use crate::stiefel::{build_skew, cayley_closed, StiefelPoint};

/// Step used for the finite differences.
pub const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FdReport {
    /// Largest relative error over all trials.
    pub max_error: f64,
    /// Largest `|⟨V, π(∇f)⟩|` seen.
    pub max_analytic: f64,
    /// Largest finite-difference slope seen.
    pub max_numeric: f64,
    pub trials: usize,
}

impl FdReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_error <= tol
    }

    pub(crate) fn record(&mut self, analytic: f64, numeric: f64) {
        self.max_error = self.max_error.max(directional_error(analytic, numeric));
        self.max_analytic = self.max_analytic.max(analytic.abs());
        self.max_numeric = self.max_numeric.max(numeric.abs());
        self.trials += 1;
    }

    pub fn merge(&mut self, other: &FdReport) {
        self.max_error = self.max_error.max(other.max_error);
        self.max_analytic = self.max_analytic.max(other.max_analytic);
        self.max_numeric = self.max_numeric.max(other.max_numeric);
        self.trials += other.trials;
    }
}

/// `|a − n| / max(|n|, 1)`: relative for large slopes, absolute near zero.
pub fn directional_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / numeric.abs().max(1.0)
}

/// Compares the slope of `f` along the Cayley curve through `x` in a random
/// unit tangent direction `V` with `Re tr(Vᴴ·π(∇f(X)))`.
///
/// The slope is a central difference `(f(Y(ε)) − f(Y(−ε)))/2ε` with the
/// closed-form retraction, whose velocity at zero is exactly `V`.
pub fn fd_check<T: Scalar, P: Objective<T> + ?Sized>(
    problem: &P,
    x: &StiefelPoint<T>,
    rng: &mut Rng,
    trials: usize,
) -> Result<FdReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("fd_check needs at least one trial"));
    }
    let (n, p) = x.shape();
    if problem.dims() != (n, p) {
        return Err(Error::DimensionMismatch {
            op: "fd_check",
            left: problem.dims(),
            right: (n, p),
        });
    }
    // The perturbed points may sit slightly off the manifold; only the loss
    // is evaluated there.
    let x = x.clone().retolerate(1e-6_f64.max(x.ortho_tol()))?;
    let riem = problem.riemannian_grad(&x)?;
    let mut report = FdReport::default();
    for _ in 0..trials {
        let raw = gaussian_matrix::<T>(rng, n, p);
        let w = build_skew(&x, &raw)?;
        let v = w.apply(x.matrix())?;
        let norm = v.frobenius_norm();
        let (w, v) = if norm > 0.0 {
            (w.scale(1.0 / norm), v.scale(1.0 / norm))
        } else {
            (w, v)
        };
        let analytic = v.inner(&riem)?;
        let plus = problem.loss(cayley_closed(&x, &w, FD_STEP)?.matrix())?;
        let minus = problem.loss(cayley_closed(&x, &w, -FD_STEP)?.matrix())?;
        report.record(analytic, (plus - minus) / (2.0 * FD_STEP));
    }
    Ok(report)
}

/// Wraps an objective and multiplies its gradient by a constant; a factor
/// other than one gives a deliberately wrong gradient.
#[derive(Debug, Clone)]
pub struct ScaledGradient<P> {
    pub inner: P,
    pub factor: f64,
}

impl<T: Scalar, P: Objective<T>> Objective<T> for ScaledGradient<P> {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn dims(&self) -> (usize, usize) {
        self.inner.dims()
    }

    fn loss(&self, x: &Matrix<T>) -> Result<f64> {
        self.inner.loss(x)
    }

    fn grad(&self, x: &Matrix<T>) -> Result<Matrix<T>> {
        Ok(self.inner.grad(x)?.scale(self.factor))
    }

    fn optimum(&self) -> Option<f64> {
        self.inner.optimum()
    }

    fn planted(&self) -> Option<&StiefelPoint<T>> {
        self.inner.planted()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{default_spectrum, make_procrustes, make_subspace};
    use crate::stiefel::random_point;
    use num_complex::Complex64;

    #[test]
    fn subspace_gradient_passes() {
        let mut rng = Rng::new(1);
        let s = make_subspace::<f64>(&mut rng, 10, 3, &default_spectrum(10, 3)).unwrap();
        let x = random_point(&mut rng, 10, 3).unwrap();
        let r = fd_check(&s, &x, &mut rng, 10).unwrap();
        assert!(r.passes(1e-4), "{r:?}");
        assert_eq!(r.trials, 10);
    }

    #[test]
    fn complex_procrustes_gradient_passes() {
        let mut rng = Rng::new(2);
        let p = make_procrustes::<Complex64>(&mut rng, 6).unwrap();
        let x = random_point(&mut rng, 6, 6).unwrap();
        assert!(fd_check(&p, &x, &mut rng, 10).unwrap().passes(1e-4));
    }

    #[test]
    fn planted_optimum_has_flat_slopes() {
        let mut rng = Rng::new(3);
        let s = make_subspace::<f64>(&mut rng, 8, 2, &default_spectrum(8, 2)).unwrap();
        let x = s.planted().unwrap().clone();
        let r = fd_check(&s, &x, &mut rng, 5).unwrap();
        assert!(r.max_analytic <= 1e-6 && r.max_numeric <= 1e-6, "{r:?}");
    }

    #[test]
    fn doubled_gradient_is_caught() {
        let mut rng = Rng::new(4);
        let s = make_subspace::<f64>(&mut rng, 10, 3, &default_spectrum(10, 3)).unwrap();
        let bad = ScaledGradient { inner: s, factor: 2.0 };
        let x = random_point(&mut rng, 10, 3).unwrap();
        let r = fd_check(&bad, &x, &mut rng, 20).unwrap();
        assert!(!r.passes(1e-4));
        assert!(r.max_error > 0.5 && r.max_error < 1.5, "{r:?}");
    }

    #[test]
    fn zero_trials_rejected() {
        let mut rng = Rng::new(5);
        let s = make_subspace::<f64>(&mut rng, 4, 1, &default_spectrum(4, 1)).unwrap();
        let x = random_point(&mut rng, 4, 1).unwrap();
        assert!(fd_check(&s, &x, &mut rng, 0).is_err());
    }
}
