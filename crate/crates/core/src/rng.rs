//! Seeded random sampling.
//!
//! [`Rng`] is ChaCha8 keyed from a 64-bit seed (`SeedableRng::seed_from_u64`)
//! with a 64-bit stream selector. ChaCha is a counter-mode generator, so a
//! `(seed, stream)` pair names the same sample sequence on every platform.
//! Gaussian variates use the ziggurat sampler from `rand_distr`.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StandardUniform};

use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct Rng {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, stream, inner }
    }

    /// Independent generator sharing this seed but reading stream `stream`.
    /// The parent is not advanced.
    pub fn split(&self, stream: u64) -> Self {
        Self::with_stream(self.seed, stream)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        StandardUniform.sample(&mut self.inner)
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    /// Standard normal scalar; complex values get independent real and
    /// imaginary parts.
    pub fn scalar<T: Scalar>(&mut self) -> T {
        match T::FIELD {
            crate::Field::Real => T::from_real(self.normal()),
            crate::Field::Complex => {
                let re = self.normal();
                let im = self.normal();
                T::from_parts(re, im)
            }
        }
    }
}

/// `rows × cols` matrix of i.i.d. standard normal entries, filled row by row.
pub fn gaussian_matrix<T: Scalar>(rng: &mut Rng, rows: usize, cols: usize) -> Matrix<T> {
    Matrix::from_fn(rows, cols, |_, _| rng.scalar())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn same_seed_same_matrix() {
        let a = gaussian_matrix::<f64>(&mut Rng::new(42), 5, 3);
        let b = gaussian_matrix::<f64>(&mut Rng::new(42), 5, 3);
        assert_eq!(a, b);
        let a = gaussian_matrix::<Complex64>(&mut Rng::new(42), 5, 3);
        let b = gaussian_matrix::<Complex64>(&mut Rng::new(42), 5, 3);
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_differ() {
        let a = gaussian_matrix::<f64>(&mut Rng::new(1), 4, 4);
        let b = gaussian_matrix::<f64>(&mut Rng::new(2), 4, 4);
        assert!(a.as_slice().iter().zip(b.as_slice()).any(|(x, y)| x != y));
    }

    #[test]
    fn streams_are_independent_of_parent_position() {
        let mut parent = Rng::new(9);
        let child_before = parent.split(3).next_u64();
        parent.next_u64();
        let child_after = parent.split(3).next_u64();
        assert_eq!(child_before, child_after);
        assert_ne!(Rng::with_stream(9, 0).next_u64(), Rng::with_stream(9, 1).next_u64());
    }

    #[test]
    fn sample_mean_within_clt_bound() {
        let (n, p) = (1000, 1000);
        let m = gaussian_matrix::<f64>(&mut Rng::new(2024), n, p);
        let mean: f64 = m.as_slice().iter().sum::<f64>() / (n * p) as f64;
        assert!(mean.abs() <= 5.0 / libm::sqrt((n * p) as f64), "mean {mean}");
    }
}
