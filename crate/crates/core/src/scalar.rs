//! Scalar fields: `f64` and `Complex64`.

use core::fmt::Debug;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Real,
    Complex,
}

/// Element type of a [`Matrix`](crate::Matrix).
///
/// Every kernel is generic over this trait, so complex matrices are handled
/// natively (adjoints conjugate, norms use `|z|²`) rather than through a real
/// embedding.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    const FIELD: Field;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(re: f64) -> Self;
    /// Builds a scalar from real and imaginary parts. The imaginary part is
    /// dropped for real fields.
    fn from_parts(re: f64, im: f64) -> Self;
    fn conj(self) -> Self;
    fn re(self) -> f64;
    fn im(self) -> f64;
    /// `|z|²`
    fn abs_sqr(self) -> f64;
    fn is_finite(self) -> bool;

    #[inline]
    fn abs(self) -> f64 {
        libm::sqrt(self.abs_sqr())
    }

    #[inline]
    fn scale(self, factor: f64) -> Self {
        self * Self::from_real(factor)
    }
}

impl Scalar for f64 {
    const FIELD: Field = Field::Real;

    #[inline]
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn one() -> Self {
        1.0
    }
    #[inline]
    fn from_real(re: f64) -> Self {
        re
    }
    #[inline]
    fn from_parts(re: f64, _im: f64) -> Self {
        re
    }
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn re(self) -> f64 {
        self
    }
    #[inline]
    fn im(self) -> f64 {
        0.0
    }
    #[inline]
    fn abs_sqr(self) -> f64 {
        self * self
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    #[inline]
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    #[inline]
    fn scale(self, factor: f64) -> Self {
        self * factor
    }
}

impl Scalar for Complex64 {
    const FIELD: Field = Field::Complex;

    #[inline]
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    #[inline]
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    #[inline]
    fn from_real(re: f64) -> Self {
        Complex64::new(re, 0.0)
    }
    #[inline]
    fn from_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }
    #[inline]
    fn conj(self) -> Self {
        Complex64::new(self.re, -self.im)
    }
    #[inline]
    fn re(self) -> f64 {
        self.re
    }
    #[inline]
    fn im(self) -> f64 {
        self.im
    }
    #[inline]
    fn abs_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }
    #[inline]
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    #[inline]
    fn scale(self, factor: f64) -> Self {
        Complex64::new(self.re * factor, self.im * factor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugation_is_an_involution() {
        let z = Complex64::new(1.5, -2.25);
        assert_eq!(z.conj().conj(), z);
        assert_eq!(Scalar::conj(3.0_f64), 3.0);
    }

    #[test]
    fn abs_sqr_matches_product_with_conjugate() {
        let z = Complex64::new(3.0, 4.0);
        let prod = z * Scalar::conj(z);
        assert_eq!(prod.im, 0.0);
        assert_eq!(prod.re, z.abs_sqr());
        assert_eq!(Scalar::abs(z), 5.0);
    }

    #[test]
    fn from_parts_drops_imaginary_for_reals() {
        assert_eq!(<f64 as Scalar>::from_parts(2.0, 7.0), 2.0);
        assert_eq!(<Complex64 as Scalar>::from_parts(2.0, 7.0), Complex64::new(2.0, 7.0));
    }
}
