//! Unconstrained baselines: heavy-ball SGD and elementwise ADAM.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

fn check<T: Scalar>(x: &Matrix<T>, state: &Matrix<T>, grad: &Matrix<T>) -> Result<()> {
    if grad.shape() != x.shape() || state.shape() != x.shape() {
        return Err(Error::DimensionMismatch {
            op: "euclidean step",
            left: x.shape(),
            right: grad.shape(),
        });
    }
    if !grad.is_finite() {
        return Err(Error::NonFiniteGradient);
    }
    Ok(())
}

/// Heavy-ball update `M′ = βM − G`, `X′ = X + l·M′`.
pub fn euclid_sgd_step<T: Scalar>(
    momentum: &Matrix<T>,
    x: &Matrix<T>,
    grad: &Matrix<T>,
    lr: f64,
    beta: f64,
) -> Result<(Matrix<T>, Matrix<T>)> {
    check(x, momentum, grad)?;
    let m = momentum.scale(beta).sub(grad)?;
    let x_next = x.add_scaled(T::from_real(lr), &m)?;
    Ok((x_next, m))
}

#[derive(Debug, Clone)]
pub struct EuclidSgd<T> {
    pub lr: f64,
    pub beta: f64,
    momentum: Matrix<T>,
}

impl<T: Scalar> EuclidSgd<T> {
    pub fn new(lr: f64, beta: f64, rows: usize, cols: usize) -> Self {
        Self {
            lr,
            beta,
            momentum: Matrix::zeros(rows, cols),
        }
    }

    pub fn momentum(&self) -> &Matrix<T> {
        &self.momentum
    }

    pub fn step(&mut self, x: &Matrix<T>, grad: &Matrix<T>) -> Result<Matrix<T>> {
        let (x_next, m) = euclid_sgd_step(&self.momentum, x, grad, self.lr, self.beta)?;
        self.momentum = m;
        Ok(x_next)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EuclidAdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl EuclidAdamConfig {
    pub fn new(lr: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Standard ADAM with bias correction; `x ← x − l·m̂/(√v̂ + ε)` entrywise.
/// For complex entries the second moment tracks `|g|²`.
#[derive(Debug, Clone)]
pub struct EuclidAdam<T> {
    pub config: EuclidAdamConfig,
    m: Matrix<T>,
    v: Vec<f64>,
    t: u64,
}

impl<T: Scalar> EuclidAdam<T> {
    pub fn new(config: EuclidAdamConfig, rows: usize, cols: usize) -> Self {
        Self {
            config,
            m: Matrix::zeros(rows, cols),
            v: vec![0.0; rows * cols],
            t: 0,
        }
    }

    pub fn steps_taken(&self) -> u64 {
        self.t
    }

    pub fn step(&mut self, x: &Matrix<T>, grad: &Matrix<T>) -> Result<Matrix<T>> {
        check(x, &self.m, grad)?;
        let c = self.config;
        let t = self.t + 1;
        let bias1 = 1.0 - libm::pow(c.beta1, t as f64);
        let bias2 = 1.0 - libm::pow(c.beta2, t as f64);
        let mut m = self.m.clone();
        let mut v = self.v.clone();
        let mut x_next = x.clone();
        for (((mi, vi), xi), &gi) in m
            .as_mut_slice()
            .iter_mut()
            .zip(v.iter_mut())
            .zip(x_next.as_mut_slice().iter_mut())
            .zip(grad.as_slice())
        {
            *mi = mi.scale(c.beta1) + gi.scale(1.0 - c.beta1);
            *vi = c.beta2 * *vi + (1.0 - c.beta2) * gi.abs_sqr();
            let m_hat = mi.scale(1.0 / bias1);
            let v_hat = *vi / bias2;
            *xi -= m_hat.scale(c.lr / (libm::sqrt(v_hat) + c.eps));
        }
        self.m = m;
        self.v = v;
        self.t = t;
        Ok(x_next)
    }
}
