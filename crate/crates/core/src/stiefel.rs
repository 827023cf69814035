//! Geometry of the Stiefel manifold `St(n, p) = {X ∈ 𝔽^{n×p} : XᴴX = I_p}`.
//!
//! The manifold is treated as an embedded submanifold of `𝔽^{n×p}` with the
//! Euclidean metric `⟨Z₁, Z₂⟩ = Re tr(Z₁ᴴ Z₂)`. Tangent vectors at `X` are the
//! `Z` with `ZᴴX + XᴴZ = 0`.
//!
//! Updates move along the Cayley curve
//!
//! ```text
//! Y(α) = (I − α/2·W)⁻¹ (I + α/2·W) X,          W = −Wᴴ
//! ```
//!
//! which stays on the manifold, starts at `Y(0) = X` and leaves with velocity
//! `Y'(0) = W·X`. Instead of solving the linear system, the curve can be
//! evaluated by the fixed-point recurrence `Yⁱ = X + α/2·W(X + Yⁱ⁻¹)`, which
//! contracts whenever `α‖W‖/2 < 1` and needs only matrix products.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{qr_decompose, solve_linear};
use crate::matrix::Matrix;
use crate::rng::{gaussian_matrix, Rng};
use crate::scalar::Scalar;

/// Default orthonormality tolerance for points maintained by an optimizer.
pub const DEFAULT_ORTHO_TOL: f64 = 1e-6;

/// Contraction factor and fixed-point defaults for the iterative retraction.
pub const DEFAULT_Q: f64 = 0.5;
pub const DEFAULT_EPS: f64 = 1e-8;
pub const DEFAULT_ITERATIONS: usize = 2;

/// `‖XᴴX − I_p‖_F`
pub fn orthonormality_error<T: Scalar>(x: &Matrix<T>) -> f64 {
    let gram = x.adjoint_mul(x).expect("Gram matrix shapes always agree");
    let p = gram.rows();
    let mut acc = 0.0;
    for i in 0..p {
        for j in 0..p {
            let target = if i == j { T::one() } else { T::zero() };
            acc += (gram[(i, j)] - target).abs_sqr();
        }
    }
    libm::sqrt(acc)
}

/// A column-orthonormal `n × p` matrix, validated on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct StiefelPoint<T> {
    mat: Matrix<T>,
    ortho_tol: f64,
}

impl<T: Scalar> StiefelPoint<T> {
    pub fn new(mat: Matrix<T>) -> Result<Self> {
        Self::with_tol(mat, DEFAULT_ORTHO_TOL)
    }

    /// Accepts `mat` if `‖matᴴ·mat − I‖_F ≤ ortho_tol`.
    pub fn with_tol(mat: Matrix<T>, ortho_tol: f64) -> Result<Self> {
        if !(ortho_tol >= 0.0) {
            return Err(Error::InvalidArgument("orthonormality tolerance must be nonnegative"));
        }
        if mat.rows() < mat.cols() {
            return Err(Error::InvalidArgument("Stiefel points need rows >= cols"));
        }
        let error = orthonormality_error(&mat);
        if !(error <= ortho_tol) {
            return Err(Error::NotOrthonormal { error, tol: ortho_tol });
        }
        Ok(Self { mat, ortho_tol })
    }

    /// The leading `n × p` block of the identity.
    pub fn eye(n: usize, p: usize) -> Result<Self> {
        Self::new(Matrix::eye(n, p))
    }

    #[inline]
    pub fn matrix(&self) -> &Matrix<T> {
        &self.mat
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.mat
    }

    #[inline]
    pub fn ortho_tol(&self) -> f64 {
        self.ortho_tol
    }

    /// Same matrix under a different tolerance (re-validated).
    pub fn retolerate(self, ortho_tol: f64) -> Result<Self> {
        Self::with_tol(self.mat, ortho_tol)
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        self.mat.shape()
    }

    pub fn orthonormality_error(&self) -> f64 {
        orthonormality_error(&self.mat)
    }
}

/// A matrix in the tangent space at [`at`](TangentVector::at).
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector<T> {
    at: StiefelPoint<T>,
    mat: Matrix<T>,
}

impl<T: Scalar> TangentVector<T> {
    /// Checks `‖matᴴX + Xᴴmat‖_F ≤ 1e−8·max(1, ‖mat‖_F)`.
    pub fn new(at: StiefelPoint<T>, mat: Matrix<T>) -> Result<Self> {
        if mat.shape() != at.shape() {
            return Err(Error::DimensionMismatch {
                op: "TangentVector::new",
                left: at.shape(),
                right: mat.shape(),
            });
        }
        let residual = tangency_residual(at.matrix(), &mat)?;
        if residual > 1e-8 * mat.frobenius_norm().max(1.0) {
            return Err(Error::InvalidArgument("matrix is not tangent at the base point"));
        }
        Ok(Self { at, mat })
    }

    pub fn at(&self) -> &StiefelPoint<T> {
        &self.at
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.mat
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.mat
    }

    /// Riemannian metric `Re tr(selfᴴ other)`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.mat.inner(&other.mat)
    }

    pub fn norm(&self) -> f64 {
        self.mat.frobenius_norm()
    }
}

/// `‖ZᴴX + XᴴZ‖_F`
pub fn tangency_residual<T: Scalar>(x: &Matrix<T>, z: &Matrix<T>) -> Result<f64> {
    let a = x.adjoint_mul(z)?;
    let mut acc = 0.0;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            acc += (a[(i, j)] + a[(j, i)].conj()).abs_sqr();
        }
    }
    Ok(libm::sqrt(acc))
}

/// An `n × n` skew-Hermitian matrix `W = −Wᴴ` generating a Cayley curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewOperator<T> {
    mat: Matrix<T>,
}

impl<T: Scalar> SkewOperator<T> {
    /// Validates `‖W + Wᴴ‖_F ≤ 1e−10·max(1, ‖W‖_F)`.
    pub fn new(mat: Matrix<T>) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::InvalidArgument("skew operator must be square"));
        }
        let n = mat.rows();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (mat[(i, j)] + mat[(j, i)].conj()).abs_sqr();
            }
        }
        if libm::sqrt(acc) > 1e-10 * mat.frobenius_norm().max(1.0) {
            return Err(Error::InvalidArgument("matrix is not skew-Hermitian"));
        }
        Ok(Self { mat })
    }

    /// `Ŵ − Ŵᴴ`, skew-Hermitian exactly (bit for bit) by construction.
    pub fn from_generator(hat: &Matrix<T>) -> Result<Self> {
        if !hat.is_square() {
            return Err(Error::InvalidArgument("skew generator must be square"));
        }
        let n = hat.rows();
        let mat = Matrix::from_fn(n, n, |i, j| hat[(i, j)] - hat[(j, i)].conj());
        Ok(Self { mat })
    }

    pub fn zeros(n: usize) -> Self {
        Self { mat: Matrix::zeros(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.mat
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.frobenius_norm()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { mat: self.mat.scale(factor) }
    }

    /// `W·Z`
    pub fn apply(&self, z: &Matrix<T>) -> Result<Matrix<T>> {
        self.mat.matmul(z)
    }
}

/// Random skew-Hermitian matrix `(G − Gᴴ)/(2√n)` with `G` standard normal;
/// its spectral norm is of order one.
pub fn random_skew<T: Scalar>(rng: &mut Rng, n: usize) -> SkewOperator<T> {
    let g = gaussian_matrix::<T>(rng, n, n);
    SkewOperator::from_generator(&g)
        .expect("square")
        .scale(0.5 / libm::sqrt(n as f64))
}

/// Builds `W = Ŵ − Ŵᴴ` with `Ŵ = Z·Xᴴ − ½·X(XᴴZXᴴ)`.
///
/// `W·X` is the projection of `Z` onto the tangent space at `X`, so the
/// Cayley curve driven by `W` leaves `X` along the projected direction.
pub fn build_skew<T: Scalar>(x: &StiefelPoint<T>, z: &Matrix<T>) -> Result<SkewOperator<T>> {
    let xm = x.matrix();
    if z.shape() != xm.shape() {
        return Err(Error::DimensionMismatch {
            op: "build_skew",
            left: xm.shape(),
            right: z.shape(),
        });
    }
    let zxh = z.mul_adjoint(xm)?;
    let xhz = xm.adjoint_mul(z)?;
    let inner = xhz.mul_adjoint(xm)?;
    let correction = xm.matmul(&inner)?;
    let hat = zxh.add_scaled(T::from_real(-0.5), &correction)?;
    SkewOperator::from_generator(&hat)
}

/// Projection of `Z` onto the tangent space at `X`, computed as `W·X`.
pub fn tangent_project<T: Scalar>(x: &StiefelPoint<T>, z: &Matrix<T>) -> Result<TangentVector<T>> {
    let w = build_skew(x, z)?;
    let mat = w.apply(x.matrix())?;
    Ok(TangentVector { at: x.clone(), mat })
}

/// Closed-form Cayley curve `Y(α) = (I − α/2·W)⁻¹(I + α/2·W)X`, evaluated as a
/// linear solve. `Y(0)` is `X` exactly.
///
/// The returned point keeps the tolerance of `x`.
pub fn cayley_closed<T: Scalar>(
    x: &StiefelPoint<T>,
    w: &SkewOperator<T>,
    alpha: f64,
) -> Result<StiefelPoint<T>> {
    check_operands(x, w, alpha)?;
    if alpha == 0.0 {
        return Ok(x.clone());
    }
    cayley_closed_from(x, w, &w.apply(x.matrix())?, alpha)
}

/// [`cayley_closed`] with `W X` supplied by the caller, as the optimizers
/// already hold it.
pub fn cayley_closed_from<T: Scalar>(
    x: &StiefelPoint<T>,
    w: &SkewOperator<T>,
    wx: &Matrix<T>,
    alpha: f64,
) -> Result<StiefelPoint<T>> {
    check_operands(x, w, alpha)?;
    if wx.shape() != x.shape() {
        return Err(Error::DimensionMismatch {
            op: "cayley_closed_from",
            left: x.shape(),
            right: wx.shape(),
        });
    }
    if alpha == 0.0 {
        return Ok(x.clone());
    }
    let half = T::from_real(0.5 * alpha);
    let n = w.dim();
    let lhs = Matrix::<T>::identity(n).add_scaled(-half, w.matrix())?;
    let rhs = x.matrix().add_scaled(half, wx)?;
    let y = solve_linear(&lhs, &rhs)?;
    StiefelPoint::with_tol(y, x.ortho_tol())
}

/// `s` steps of the fixed-point recurrence `Yⁱ = X + α/2·W(X + Yⁱ⁻¹)`
/// starting from `y0`; returns `Yˢ`.
///
/// `alpha` may be negative, which runs the curve of `−W`. The caller is
/// responsible for keeping `|α|·‖W‖/2 < 1` (see [`adaptive_alpha`]); outside
/// that range the iteration need not converge.
pub fn cayley_iterative<T: Scalar>(
    x: &StiefelPoint<T>,
    w: &SkewOperator<T>,
    alpha: f64,
    s: usize,
    y0: &Matrix<T>,
) -> Result<Matrix<T>> {
    check_operands(x, w, alpha)?;
    if y0.shape() != x.shape() {
        return Err(Error::DimensionMismatch {
            op: "cayley_iterative",
            left: x.shape(),
            right: y0.shape(),
        });
    }
    let half = T::from_real(0.5 * alpha);
    let xm = x.matrix();
    let mut y = y0.clone();
    for _ in 0..s {
        let step = w.apply(&xm.add(&y)?)?;
        y = xm.add_scaled(half, &step)?;
    }
    Ok(y)
}

/// All iterates `Y⁰, …, Yˢ` of [`cayley_iterative`].
pub fn cayley_iterates<T: Scalar>(
    x: &StiefelPoint<T>,
    w: &SkewOperator<T>,
    alpha: f64,
    s: usize,
    y0: &Matrix<T>,
) -> Result<Vec<Matrix<T>>> {
    let mut out = Vec::with_capacity(s + 1);
    out.push(y0.clone());
    for _ in 0..s {
        let last = out.last().expect("non-empty");
        let next = cayley_iterative(x, w, alpha, 1, last)?;
        out.push(next);
    }
    Ok(out)
}

fn check_operands<T: Scalar>(x: &StiefelPoint<T>, w: &SkewOperator<T>, alpha: f64) -> Result<()> {
    if w.dim() != x.shape().0 {
        return Err(Error::DimensionMismatch {
            op: "cayley",
            left: x.shape(),
            right: w.matrix().shape(),
        });
    }
    if !alpha.is_finite() {
        return Err(Error::InvalidArgument("step length must be finite"));
    }
    Ok(())
}

/// Step length `min{l, 2q/(‖W‖_F + ε)}`.
///
/// The Frobenius norm bounds the spectral norm from above, so the result
/// always satisfies `α‖W‖₂/2 ≤ α‖W‖_F/2 ≤ q`.
pub fn adaptive_alpha<T: Scalar>(lr: f64, w: &SkewOperator<T>, q: f64, eps: f64) -> f64 {
    debug_assert!(lr > 0.0 && q > 0.0 && q < 1.0 && eps > 0.0);
    lr.min(2.0 * q / (w.frobenius_norm() + eps))
}

/// Haar-like random point: the `Q` factor of a Gaussian matrix.
pub fn random_point<T: Scalar>(rng: &mut Rng, n: usize, p: usize) -> Result<StiefelPoint<T>> {
    if n < p {
        return Err(Error::InvalidArgument("Stiefel points need n >= p"));
    }
    let mut last_err = Error::RankDeficient { column: 0 };
    for _ in 0..3 {
        match qr_decompose(&gaussian_matrix::<T>(rng, n, p)) {
            Ok((q, _)) => return StiefelPoint::new(q),
            Err(e @ Error::RankDeficient { .. }) => last_err = e,
            Err(e) => return Err(e),
        }
    }
    Err(last_err)
}

/// QR-based repair of a drifted matrix.
pub fn reorthonormalize<T: Scalar>(x: &Matrix<T>) -> Result<StiefelPoint<T>> {
    let (q, _) = qr_decompose(x)?;
    StiefelPoint::new(q)
}

/// Retraction diagnostics for the closed-form Cayley curve at `X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetractionCheck {
    /// `‖Y(0) − X‖_F`
    pub c0: f64,
    /// `‖(Y(h) − X)/h − WX‖_F`
    pub c1: f64,
    /// Same as `c1` at `h/2`.
    pub c1_half: f64,
    pub h: f64,
}

impl RetractionCheck {
    /// `c1(h)/c1(h/2)`, close to 2 for a first-order-accurate velocity.
    /// `None` when the defect is already at rounding level.
    pub fn order_ratio(&self) -> Option<f64> {
        if self.c1_half <= 1e-13 {
            None
        } else {
            Some(self.c1 / self.c1_half)
        }
    }
}

pub const RETRACTION_STEP: f64 = 1e-5;

pub fn retraction_check<T: Scalar>(x: &StiefelPoint<T>, w: &SkewOperator<T>) -> Result<RetractionCheck> {
    let h = RETRACTION_STEP;
    let xm = x.matrix();
    let c0 = cayley_closed(x, w, 0.0)?.matrix().sub(xm)?.frobenius_norm();
    let velocity = w.apply(xm)?;
    let defect = |step: f64| -> Result<f64> {
        let y = cayley_closed(x, w, step)?;
        let fd = y.matrix().sub(xm)?.scale(1.0 / step);
        Ok(fd.sub(&velocity)?.frobenius_norm())
    };
    Ok(RetractionCheck {
        c0,
        c1: defect(h)?,
        c1_half: defect(0.5 * h)?,
        h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn e1() -> StiefelPoint<f64> {
        StiefelPoint::new(Matrix::column(&[1.0, 0.0])).unwrap()
    }

    fn quarter_turn() -> SkewOperator<f64> {
        SkewOperator::new(Matrix::from_rows(&[[0.0, -1.0], [1.0, 0.0]])).unwrap()
    }

    #[test]
    fn closed_form_with_supplied_product_is_identical() {
        let mut rng = Rng::new(31);
        let x = random_point::<Complex64>(&mut rng, 9, 4).unwrap();
        let w = random_skew::<Complex64>(&mut rng, 9);
        let wx = w.apply(x.matrix()).unwrap();
        for alpha in [0.0, 0.3, -1.7] {
            assert_eq!(cayley_closed(&x, &w, alpha).unwrap(), cayley_closed_from(&x, &w, &wx, alpha).unwrap());
        }
        assert!(cayley_closed_from(&x, &w, &Matrix::zeros(9, 3), 0.1).is_err());
    }

    #[test]
    fn skew_of_base_point_vanishes() {
        let x = e1();
        let w = build_skew(&x, x.matrix()).unwrap();
        assert_eq!(w.frobenius_norm(), 0.0);
    }

    #[test]
    fn skew_hand_evaluation() {
        // Ŵ = [[0,0],[1,0]], W = Ŵ − Ŵᵀ.
        let w = build_skew(&e1(), &Matrix::column(&[0.0, 1.0])).unwrap();
        assert_eq!(w, quarter_turn());
    }

    #[test]
    fn skew_is_exactly_skew_for_random_inputs() {
        let mut rng = Rng::new(12);
        let x = random_point::<Complex64>(&mut rng, 7, 3).unwrap();
        let z = gaussian_matrix::<Complex64>(&mut rng, 7, 3);
        let w = build_skew(&x, &z).unwrap();
        let sum = w.matrix().add(&w.matrix().conj_transpose()).unwrap();
        assert!(sum.frobenius_norm() <= 1e-12);
        assert!(SkewOperator::new(w.matrix().clone()).is_ok());
    }

    #[test]
    fn skew_rejects_bad_shapes() {
        let z = Matrix::<f64>::zeros(3, 1);
        assert!(matches!(build_skew(&e1(), &z), Err(Error::DimensionMismatch { .. })));
        assert!(SkewOperator::new(Matrix::<f64>::identity(2)).is_err());
    }

    #[test]
    fn projection_examples() {
        let x = e1();
        let zero = tangent_project(&x, x.matrix()).unwrap();
        assert_eq!(zero.norm(), 0.0);

        let tangent = Matrix::column(&[0.0, 1.0]);
        assert_eq!(tangent_project(&x, &tangent).unwrap().matrix(), &tangent);

        // Oracle: Z − X·sym(XᵀZ) = [3,4]ᵀ − 3·[1,0]ᵀ.
        let projected = tangent_project(&x, &Matrix::column(&[3.0, 4.0])).unwrap();
        assert_eq!(projected.matrix(), &Matrix::column(&[0.0, 4.0]));
    }

    #[test]
    fn tangent_vector_rejects_normal_directions() {
        assert!(TangentVector::new(e1(), Matrix::column(&[1.0, 0.0])).is_err());
        assert!(TangentVector::new(e1(), Matrix::column(&[0.0, 2.0])).is_ok());
    }

    #[test]
    fn closed_form_at_zero_is_identity_map() {
        let mut rng = Rng::new(5);
        let x = random_point::<f64>(&mut rng, 6, 2).unwrap();
        let w = random_skew::<f64>(&mut rng, 6);
        assert_eq!(cayley_closed(&x, &w, 0.0).unwrap(), x);
    }

    #[test]
    fn closed_form_quarter_turn() {
        // (I − W)⁻¹(I + W) = [[0,−1],[1,0]] for the quarter-turn generator.
        let y = cayley_closed(&e1(), &quarter_turn(), 2.0).unwrap();
        assert!(y.matrix().max_abs_diff(&Matrix::column(&[0.0, 1.0])).unwrap() <= 1e-15);
    }

    #[test]
    fn closed_form_stays_orthonormal() {
        let mut rng = Rng::new(6);
        let x = random_point::<f64>(&mut rng, 10, 4).unwrap();
        let w = random_skew::<f64>(&mut rng, 10).scale(3.0);
        for alpha in [0.01, 0.1, 1.0, 10.0] {
            let y = cayley_closed(&x, &w, alpha).unwrap();
            assert!(y.orthonormality_error() <= 1e3 * f64::EPSILON * 10.0);
        }
    }

    #[test]
    fn iterative_with_zero_generator_is_fixed() {
        let mut rng = Rng::new(3);
        let x = random_point::<f64>(&mut rng, 5, 2).unwrap();
        let w = SkewOperator::zeros(5);
        for s in [0, 1, 4] {
            let y = cayley_iterative(&x, &w, 0.3, s, x.matrix()).unwrap();
            assert_eq!(&y, x.matrix());
        }
    }

    #[test]
    fn iterative_converges_to_closed_form() {
        let mut rng = Rng::new(31);
        let x = random_point::<f64>(&mut rng, 6, 3).unwrap();
        let w = random_skew::<f64>(&mut rng, 6);
        let alpha = adaptive_alpha(0.5, &w, DEFAULT_Q, DEFAULT_EPS);
        let y0 = x.matrix().add_scaled(alpha, &w.apply(x.matrix()).unwrap()).unwrap();
        let y = cayley_iterative(&x, &w, alpha, 50, &y0).unwrap();
        let closed = cayley_closed(&x, &w, alpha).unwrap();
        assert!(y.sub(closed.matrix()).unwrap().frobenius_norm() <= 1e-12);
    }

    #[test]
    fn iterates_are_consistent_with_single_call() {
        let mut rng = Rng::new(32);
        let x = random_point::<Complex64>(&mut rng, 5, 2).unwrap();
        let w = random_skew::<Complex64>(&mut rng, 5);
        let all = cayley_iterates(&x, &w, 0.2, 3, x.matrix()).unwrap();
        assert_eq!(all.len(), 4);
        assert_eq!(all[3], cayley_iterative(&x, &w, 0.2, 3, x.matrix()).unwrap());
    }

    #[test]
    fn adaptive_alpha_examples() {
        let w_small = SkewOperator::new(Matrix::from_rows(&[[0.0, -0.1], [0.1, 0.0]]).scale(1.0 / libm::sqrt(2.0))).unwrap();
        assert!((w_small.frobenius_norm() - 0.1).abs() < 1e-15);
        assert_eq!(adaptive_alpha(0.2, &w_small, 0.5, 1e-8), 0.2);

        let w_big = w_small.scale(1000.0);
        let alpha = adaptive_alpha(0.2, &w_big, 0.5, 1e-8);
        assert!((alpha - 1.0 / (100.0 + 1e-8)).abs() < 1e-15);

        assert_eq!(adaptive_alpha(0.2, &SkewOperator::<f64>::zeros(3), 0.5, 1e-8), 0.2);
    }

    #[test]
    fn orthonormality_error_examples() {
        assert_eq!(orthonormality_error(&Matrix::<f64>::eye(4, 2)), 0.0);
        assert_eq!(orthonormality_error(&Matrix::column(&[2.0, 0.0])), 3.0);
    }

    #[test]
    fn point_validation() {
        assert!(matches!(
            StiefelPoint::new(Matrix::column(&[2.0, 0.0])),
            Err(Error::NotOrthonormal { .. })
        ));
        assert!(StiefelPoint::new(Matrix::<f64>::eye(2, 3)).is_err());
        assert!(StiefelPoint::with_tol(Matrix::column(&[2.0, 0.0]), 3.0).is_ok());
    }

    #[test]
    fn random_point_examples() {
        let x = random_point::<f64>(&mut Rng::new(42), 4, 2).unwrap();
        assert!(x.orthonormality_error() <= 1e-12);
        let again = random_point::<f64>(&mut Rng::new(42), 4, 2).unwrap();
        assert_eq!(x, again);
        let u = random_point::<Complex64>(&mut Rng::new(42), 8, 8).unwrap();
        assert!(u.orthonormality_error() <= 1e-12);
        assert!(random_point::<f64>(&mut Rng::new(1), 2, 3).is_err());
    }

    #[test]
    fn retraction_check_zero_generator() {
        let x = random_point::<f64>(&mut Rng::new(2), 5, 2).unwrap();
        let check = retraction_check(&x, &SkewOperator::zeros(5)).unwrap();
        assert_eq!((check.c0, check.c1), (0.0, 0.0));
        assert_eq!(check.order_ratio(), None);
    }

    #[test]
    fn retraction_check_quarter_turn() {
        let check = retraction_check(&e1(), &quarter_turn()).unwrap();
        assert_eq!(check.c0, 0.0);
        assert!(check.c1 <= 1e-4);
        let ratio = check.order_ratio().unwrap();
        assert!((1.8..=2.2).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn retraction_check_random_first_order() {
        let mut rng = Rng::new(77);
        let x = random_point::<f64>(&mut rng, 12, 4).unwrap();
        let w = random_skew::<f64>(&mut rng, 12);
        let ratio = retraction_check(&x, &w).unwrap().order_ratio().unwrap();
        assert!((1.8..=2.2).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn reorthonormalize_examples() {
        let mut rng = Rng::new(4);
        let x = random_point::<f64>(&mut rng, 6, 3).unwrap();
        let same = reorthonormalize(x.matrix()).unwrap();
        assert!(same.matrix().max_abs_diff(x.matrix()).unwrap() <= 1e-12);

        let scaled = Matrix::from_fn(6, 3, |i, j| x.matrix()[(i, j)] * (1.0 + 0.01 * (j + 1) as f64));
        assert!(reorthonormalize(&scaled).unwrap().orthonormality_error() <= 1e-12);

        let mut degenerate = x.into_matrix();
        for i in 0..6 {
            degenerate[(i, 1)] = 0.0;
        }
        assert_eq!(reorthonormalize(&degenerate).unwrap_err(), Error::RankDeficient { column: 1 });
    }
}
