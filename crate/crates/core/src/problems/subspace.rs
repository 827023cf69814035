use alloc::string::String;
use alloc::vec::Vec;

use super::Objective;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::Rng;
use crate::scalar::Scalar;
use crate::stiefel::{random_point, StiefelPoint};

/// Dominant invariant subspace: minimise `f(X) = −Re tr(XᴴAX)` for a
/// Hermitian `A = QΛQᴴ` built from a random orthogonal `Q` and a prescribed
/// descending spectrum. The minimum is `−(λ₁ + … + λ_p)`, attained at the
/// first `p` columns of `Q`.
#[derive(Debug, Clone)]
pub struct Subspace<T> {
    name: String,
    a: Matrix<T>,
    spectrum: Vec<f64>,
    p: usize,
    planted: StiefelPoint<T>,
}

/// Top `p` eigenvalues evenly spaced in `(2, 3]`, the rest evenly spaced in
/// `(0, 1]`, so the spectral gap is at least one.
pub fn default_spectrum(n: usize, p: usize) -> Vec<f64> {
    let top = (0..p).map(|i| 3.0 - i as f64 / p as f64);
    let rest = n - p;
    let bottom = (0..rest).map(move |i| 1.0 - i as f64 / rest as f64);
    top.chain(bottom).collect()
}

pub fn make_subspace<T: Scalar>(rng: &mut Rng, n: usize, p: usize, spectrum: &[f64]) -> Result<Subspace<T>> {
    if p == 0 || p > n {
        return Err(Error::InvalidArgument("subspace problem needs 1 <= p <= n"));
    }
    if spectrum.len() != n {
        return Err(Error::InvalidArgument("spectrum length must equal n"));
    }
    if spectrum.windows(2).any(|w| !(w[0] >= w[1])) || spectrum.iter().any(|l| !l.is_finite()) {
        return Err(Error::InvalidArgument("spectrum must be finite and descending"));
    }
    let q = random_point::<T>(rng, n, n)?.into_matrix();
    let scaled = Matrix::from_fn(n, n, |i, j| q[(i, j)].scale(spectrum[j]));
    let mut a = scaled.mul_adjoint(&q)?;
    // Symmetrise away rounding so A is Hermitian bit for bit.
    for i in 0..n {
        for j in 0..i {
            let v = (a[(i, j)] + a[(j, i)].conj()).scale(0.5);
            a[(i, j)] = v;
            a[(j, i)] = v.conj();
        }
        a[(i, i)] = T::from_real(a[(i, i)].re());
    }
    let planted = StiefelPoint::new(q.block(0, 0, n, p)?)?;
    Ok(Subspace {
        name: alloc::format!("subspace-{n}x{p}"),
        a,
        spectrum: spectrum.to_vec(),
        p,
        planted,
    })
}

impl<T: Scalar> Subspace<T> {
    pub fn matrix(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    /// `[−Σ top-p λ, −Σ bottom-p λ]`, the range of `f` over the manifold.
    pub fn rayleigh_bounds(&self) -> (f64, f64) {
        let n = self.spectrum.len();
        let top: f64 = self.spectrum[..self.p].iter().sum();
        let bottom: f64 = self.spectrum[n - self.p..].iter().sum();
        (-top, -bottom)
    }
}

impl<T: Scalar> Objective<T> for Subspace<T> {
    fn name(&self) -> &str {
        &self.name
    }

    fn dims(&self) -> (usize, usize) {
        (self.spectrum.len(), self.p)
    }

    fn loss(&self, x: &Matrix<T>) -> Result<f64> {
        let ax = self.a.matmul(x)?;
        Ok(-x.inner(&ax)?)
    }

    /// `−2AX`
    fn grad(&self, x: &Matrix<T>) -> Result<Matrix<T>> {
        Ok(self.a.matmul(x)?.scale(-2.0))
    }

    fn optimum(&self) -> Option<f64> {
        Some(self.rayleigh_bounds().0)
    }

    fn planted(&self) -> Option<&StiefelPoint<T>> {
        Some(&self.planted)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn diagonal_case() {
        // Q = I is not what make_subspace samples, so build the objective
        // values by hand for A = diag(3, 2, 1).
        let a = Matrix::from_rows(&[[3.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 1.0]]);
        let e1 = Matrix::column(&[1.0, 0.0, 0.0]);
        let f = -e1.inner(&a.matmul(&e1).unwrap()).unwrap();
        assert_eq!(f, -3.0);
        let s = make_subspace::<f64>(&mut Rng::new(1), 3, 1, &[3.0, 2.0, 1.0]).unwrap();
        assert_eq!(s.optimum(), Some(-3.0));
    }

    #[test]
    fn planted_columns_attain_optimum() {
        let spec = default_spectrum(12, 4);
        let s = make_subspace::<f64>(&mut Rng::new(3), 12, 4, &spec).unwrap();
        let f = s.loss(s.planted().unwrap().matrix()).unwrap();
        assert!((f - s.optimum().unwrap()).abs() <= 1e-10);

        let c = make_subspace::<Complex64>(&mut Rng::new(3), 12, 4, &spec).unwrap();
        let f = c.loss(c.planted().unwrap().matrix()).unwrap();
        assert!((f - c.optimum().unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn default_spectrum_shape() {
        let s = default_spectrum(50, 5);
        assert_eq!(s.len(), 50);
        assert!(s.windows(2).all(|w| w[0] > w[1]));
        assert!(s[4] - s[5] >= 1.0);
        assert!(s.iter().all(|&l| l > 0.0));
    }

    #[test]
    fn rejects_bad_arguments() {
        let mut rng = Rng::new(0);
        assert!(make_subspace::<f64>(&mut rng, 3, 4, &[3.0, 2.0, 1.0]).is_err());
        assert!(make_subspace::<f64>(&mut rng, 3, 1, &[3.0, 2.0]).is_err());
        assert!(make_subspace::<f64>(&mut rng, 3, 1, &[1.0, 2.0, 3.0]).is_err());
    }
}
