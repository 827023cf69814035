//! LU solves and Householder QR.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// `y -= factor * x`, elementwise over two equal-length rows.
#[inline]
fn row_axpy<T: Scalar>(y: &mut [T], factor: T, x: &[T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi -= factor * xi;
    }
}

/// Borrow row `dst` mutably and row `src` immutably from one row-major buffer.
#[inline]
fn row_pair<T>(data: &mut [T], cols: usize, dst: usize, src: usize) -> (&mut [T], &[T]) {
    debug_assert_ne!(dst, src);
    if dst < src {
        let (head, tail) = data.split_at_mut(src * cols);
        (&mut head[dst * cols..(dst + 1) * cols], &tail[..cols])
    } else {
        let (head, tail) = data.split_at_mut(dst * cols);
        (&mut tail[..cols], &head[src * cols..(src + 1) * cols])
    }
}

/// LU factorisation with partial pivoting, `P·A = L·U`.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    factors: Matrix<T>,
    perm: Vec<usize>,
    swaps: usize,
}

impl<T: Scalar> Lu<T> {
    pub fn factor(a: &Matrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                op: "lu",
                left: a.shape(),
                right: (a.cols(), a.rows()),
            });
        }
        let n = a.rows();
        let scale = a.as_slice().iter().map(|x| x.abs()).fold(0.0, f64::max);
        let tiny = n as f64 * f64::EPSILON * scale;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let (piv, piv_abs) = (k..n)
                .map(|i| (i, lu[(i, k)].abs_sqr()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            let piv_abs = libm::sqrt(piv_abs);
            if !(piv_abs > tiny) {
                return Err(Error::SingularMatrix { step: k, pivot: piv_abs });
            }
            if piv != k {
                swaps += 1;
                perm.swap(k, piv);
                let data = lu.as_mut_slice();
                for j in 0..n {
                    data.swap(k * n + j, piv * n + j);
                }
            }
            let inv_pivot = T::one() / lu[(k, k)];
            let data = lu.as_mut_slice();
            for i in k + 1..n {
                let (row_i, row_k) = row_pair(data, n, i, k);
                let l = row_i[k] * inv_pivot;
                row_i[k] = l;
                row_axpy(&mut row_i[k + 1..], l, &row_k[k + 1..]);
            }
        }
        Ok(Self { factors: lu, perm, swaps })
    }

    pub fn determinant(&self) -> T {
        let n = self.factors.rows();
        let mut det = if self.swaps.is_multiple_of(2) { T::one() } else { -T::one() };
        for i in 0..n {
            det *= self.factors[(i, i)];
        }
        det
    }

    pub fn solve(&self, b: &Matrix<T>) -> Result<Matrix<T>> {
        let n = self.factors.rows();
        if b.rows() != n {
            return Err(Error::DimensionMismatch {
                op: "lu_solve",
                left: self.factors.shape(),
                right: b.shape(),
            });
        }
        let m = b.cols();
        let mut data = Vec::with_capacity(n * m);
        for &p in &self.perm {
            data.extend_from_slice(b.row(p));
        }
        let lu = &self.factors;
        for i in 1..n {
            for k in 0..i {
                let l = lu[(i, k)];
                let (yi, yk) = row_pair(&mut data, m, i, k);
                row_axpy(yi, l, yk);
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = lu[(i, k)];
                let (yi, yk) = row_pair(&mut data, m, i, k);
                row_axpy(yi, u, yk);
            }
            let inv = T::one() / lu[(i, i)];
            for y in &mut data[i * m..(i + 1) * m] {
                *y *= inv;
            }
        }
        Matrix::new(n, m, data)
    }
}

/// Solves `A·X = B` by LU with partial pivoting. No inverse is ever formed.
pub fn solve_linear<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    Lu::factor(a)?.solve(b)
}

/// Thin QR factorisation `A = Q·R` of an `n × p` matrix (`n ≥ p`) by
/// Householder reflections.
///
/// `R` is `p × p` upper triangular with a strictly positive real diagonal,
/// which makes the factorisation unique.
pub fn qr_decompose<T: Scalar>(a: &Matrix<T>) -> Result<(Matrix<T>, Matrix<T>)> {
    let (n, p) = a.shape();
    if n < p {
        return Err(Error::InvalidArgument("QR needs rows >= cols"));
    }
    let tol = 10.0 * n as f64 * f64::EPSILON * a.frobenius_norm();
    let mut work = a.clone();
    let mut reflectors: Vec<(Vec<T>, f64)> = Vec::with_capacity(p);

    for k in 0..p {
        let sigma = libm::sqrt((k..n).map(|i| work[(i, k)].abs_sqr()).sum::<f64>());
        if !(sigma > tol) {
            return Err(Error::RankDeficient { column: k });
        }
        let x0 = work[(k, k)];
        let x0_abs = x0.abs();
        let phase = if x0_abs > 0.0 { x0.scale(1.0 / x0_abs) } else { T::one() };
        let mut v: Vec<T> = (k..n).map(|i| work[(i, k)]).collect();
        v[0] += phase.scale(sigma);
        let tau = 2.0 / v.iter().map(|x| x.abs_sqr()).sum::<f64>();
        apply_reflector(&mut work, &v, tau, k, k);
        work[(k, k)] = -phase.scale(sigma);
        for i in k + 1..n {
            work[(i, k)] = T::zero();
        }
        reflectors.push((v, tau));
    }

    let mut q = Matrix::eye(n, p);
    for (k, (v, tau)) in reflectors.iter().enumerate().rev() {
        apply_reflector(&mut q, v, *tau, k, 0);
    }
    let mut r = Matrix::from_fn(p, p, |i, j| if j >= i { work[(i, j)] } else { T::zero() });

    for k in 0..p {
        let d = r[(k, k)];
        let unit = d.scale(1.0 / d.abs());
        let unit_conj = unit.conj();
        for j in k..p {
            r[(k, j)] *= unit_conj;
        }
        r[(k, k)] = T::from_real(d.abs());
        for i in 0..n {
            q[(i, k)] *= unit;
        }
    }
    Ok((q, r))
}

/// Applies `I - tau·v·vᴴ` (acting on rows `row0..`) to columns `col0..` of `m`.
fn apply_reflector<T: Scalar>(m: &mut Matrix<T>, v: &[T], tau: f64, row0: usize, col0: usize) {
    let cols = m.cols();
    for j in col0..cols {
        let mut s = T::zero();
        for (i, &vi) in v.iter().enumerate() {
            s += vi.conj() * m[(row0 + i, j)];
        }
        let s = s.scale(tau);
        for (i, &vi) in v.iter().enumerate() {
            m[(row0 + i, j)] -= vi * s;
        }
    }
}
