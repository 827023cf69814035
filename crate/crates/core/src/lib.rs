//! Riemannian optimization on the Stiefel manifold `St(n, p) = {X : XᴴX = I_p}`.
//!
//! The crate is `no_std` (it only needs `alloc`) and is organised bottom-up:
//!
//! * [`matrix`] and [`linalg`]: a small dense kernel over real and complex
//!   scalars (products, adjoints, norms, LU solves, Householder QR).
//! * [`rng`]: a seeded, portable Gaussian sampler.
//! * [`stiefel`]: tangent projection, skew generators, closed-form and
//!   fixed-point Cayley retractions, orthonormality diagnostics.
//! * [`optim`]: Cayley SGD with momentum, Cayley ADAM, their Euclidean
//!   counterparts, and mixed parameter-group stepping.
//! * [`problems`]: benchmark objectives with planted optima, a small
//!   two-layer network with one orthonormal weight, and a finite-difference
//!   gradient checker.
#![cfg_attr(not(test), no_std)]
// NaN-aware `!(a <= b)` comparisons are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod linalg;
pub mod matrix;
pub mod optim;
pub mod problems;
pub mod rng;
pub mod scalar;
pub mod stiefel;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use num_complex::Complex64;
pub use rng::Rng;
pub use scalar::{Field, Scalar};
pub use stiefel::{SkewOperator, StiefelPoint, TangentVector};
