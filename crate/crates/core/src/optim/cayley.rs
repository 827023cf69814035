//! Cayley SGD with heavy-ball momentum and Cayley ADAM.
//!
//! Both optimizers blend the Euclidean gradient into the momentum first and
//! only then build the skew generator `W` from the blended momentum. The
//! Cayley curve driven by `W` leaves `X` along the tangent projection of the
//! momentum, so the momentum is carried to the new tangent space without an
//! explicit vector transport. The momentum itself is replaced by its
//! projection `W·X` at the pre-step point.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::stiefel::{
    adaptive_alpha, build_skew, cayley_closed_from, cayley_iterative, StiefelPoint, DEFAULT_EPS,
    DEFAULT_ITERATIONS, DEFAULT_Q,
};

/// How the Cayley curve is evaluated at the chosen step length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Retraction {
    /// Fixed-point iteration with the given number of sweeps.
    Iterative { iterations: usize },
    /// Linear solve of the closed form.
    Closed,
}

impl Default for Retraction {
    fn default() -> Self {
        Retraction::Iterative {
            iterations: DEFAULT_ITERATIONS,
        }
    }
}

/// Result of one manifold step.
#[derive(Debug, Clone, PartialEq)]
pub struct CayleyStep<T> {
    pub point: StiefelPoint<T>,
    /// Step length actually used after the contraction guard.
    pub alpha: f64,
    /// `‖W‖_F` of the generator that drove the step.
    pub skew_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CayleySgdConfig {
    pub lr: f64,
    pub beta: f64,
    pub q: f64,
    pub eps: f64,
    pub retraction: Retraction,
}

impl CayleySgdConfig {
    pub fn new(lr: f64, beta: f64) -> Self {
        Self {
            lr,
            beta,
            q: DEFAULT_Q,
            eps: DEFAULT_EPS,
            retraction: Retraction::default(),
        }
    }

    pub fn with_retraction(mut self, retraction: Retraction) -> Self {
        self.retraction = retraction;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.lr > 0.0) {
            return Err(Error::InvalidArgument("learning rate must be positive"));
        }
        if !(0.0..1.0).contains(&self.beta) {
            return Err(Error::InvalidArgument("momentum coefficient must lie in [0, 1)"));
        }
        check_guard(self.q, self.eps)
    }
}

fn check_guard(q: f64, eps: f64) -> Result<()> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidArgument("contraction factor q must lie in (0, 1)"));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("eps must be positive"));
    }
    Ok(())
}

fn check_gradient<T: Scalar>(x: &StiefelPoint<T>, momentum: &Matrix<T>, grad: &Matrix<T>) -> Result<()> {
    if grad.shape() != x.shape() || momentum.shape() != x.shape() {
        return Err(Error::DimensionMismatch {
            op: "cayley step",
            left: x.shape(),
            right: grad.shape(),
        });
    }
    if !grad.is_finite() {
        return Err(Error::NonFiniteGradient);
    }
    Ok(())
}

/// Moves along the curve of `W` (for `sign = +1`) or `−W` (for `sign = −1`)
/// with the seed `Y⁰ = X + sign·α·M`. `wx` is `W X`.
fn retract<T: Scalar>(
    x: &StiefelPoint<T>,
    w: &crate::stiefel::SkewOperator<T>,
    wx: &Matrix<T>,
    seed_direction: &Matrix<T>,
    alpha: f64,
    sign: f64,
    retraction: Retraction,
) -> Result<StiefelPoint<T>> {
    match retraction {
        Retraction::Iterative { iterations } => {
            let y0 = x.matrix().add_scaled(T::from_real(sign * alpha), seed_direction)?;
            let y = cayley_iterative(x, w, sign * alpha, iterations, &y0)?;
            StiefelPoint::with_tol(y, x.ortho_tol())
        }
        Retraction::Closed => cayley_closed_from(x, w, wx, sign * alpha),
    }
}

/// Cayley SGD with heavy-ball momentum.
///
/// One step runs
///
/// ```text
/// M ← βM − G
/// Ŵ ← M Xᴴ − ½ X (Xᴴ M Xᴴ),  W ← Ŵ − Ŵᴴ
/// M ← W X
/// α ← min{l, 2q/(‖W‖_F + ε)}
/// Y⁰ ← X + αM,  Yⁱ ← X + α/2·W(X + Yⁱ⁻¹)  for i = 1..s
/// ```
///
/// and returns `Yˢ`. Since `M` absorbs `−G`, the curve is followed with a
/// positive step.
#[derive(Debug, Clone)]
pub struct CayleySgd<T> {
    config: CayleySgdConfig,
    momentum: Matrix<T>,
    step: u64,
}

impl<T: Scalar> CayleySgd<T> {
    pub fn new(config: CayleySgdConfig, rows: usize, cols: usize) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            momentum: Matrix::zeros(rows, cols),
            step: 1,
        })
    }

    pub fn config(&self) -> &CayleySgdConfig {
        &self.config
    }

    pub fn set_lr(&mut self, lr: f64) -> Result<()> {
        let mut config = self.config;
        config.lr = lr;
        config.validate()?;
        self.config = config;
        Ok(())
    }

    pub fn momentum(&self) -> &Matrix<T> {
        &self.momentum
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// Advances `x` by one step. On error the optimizer state is untouched.
    pub fn step(&mut self, x: &StiefelPoint<T>, grad: &Matrix<T>) -> Result<CayleyStep<T>> {
        check_gradient(x, &self.momentum, grad)?;
        let cfg = self.config;
        let blended = self.momentum.scale(cfg.beta).sub(grad)?;
        let w = build_skew(x, &blended)?;
        let projected = w.apply(x.matrix())?;
        let alpha = adaptive_alpha(cfg.lr, &w, cfg.q, cfg.eps);
        let point = retract(x, &w, &projected, &projected, alpha, 1.0, cfg.retraction)?;

        self.momentum = projected;
        self.step += 1;
        Ok(CayleyStep {
            point,
            alpha,
            skew_norm: w.frobenius_norm(),
        })
    }
}

/// Starting point of the fixed-point iteration in Cayley ADAM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AdamSeed {
    /// `Y⁰ = X − α·M` with the stored momentum `M = r·W X`. Off the curve
    /// by `α(r − 1)·W X`, so after `s` sweeps the error is `O(α^{s+1})`.
    Momentum,
    /// `Y⁰ = X − α·W X`, the first-order point of the curve being solved.
    /// After `s` sweeps the error is `O(α^{s+2})`.
    #[default]
    Tangent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CayleyAdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub q: f64,
    pub eps: f64,
    pub retraction: Retraction,
    pub seed: AdamSeed,
}

impl CayleyAdamConfig {
    pub fn new(lr: f64, beta1: f64, beta2: f64) -> Self {
        Self {
            lr,
            beta1,
            beta2,
            q: DEFAULT_Q,
            eps: DEFAULT_EPS,
            retraction: Retraction::default(),
            seed: AdamSeed::default(),
        }
    }

    pub fn with_retraction(mut self, retraction: Retraction) -> Self {
        self.retraction = retraction;
        self
    }

    pub fn with_seed(mut self, seed: AdamSeed) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.lr > 0.0) {
            return Err(Error::InvalidArgument("learning rate must be positive"));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::InvalidArgument("moment coefficients must lie in [0, 1)"));
        }
        check_guard(self.q, self.eps)
    }
}

/// Cayley ADAM with a single second-moment scalar per matrix.
///
/// One step runs
///
/// ```text
/// M ← β₁M + (1 − β₁)G
/// v ← β₂v + (1 − β₂)‖G‖²_F
/// v̂ ← v/(1 − β₂ᵏ)
/// r ← (1 − β₁ᵏ)·√(v̂ + ε)
/// W ← (Ŵ − Ŵᴴ)/r        with Ŵ built from M
/// M ← r·W X
/// α ← min{l, 2q/(‖W‖_F + ε)}
/// Y⁰ ← X − α·W X,  Yⁱ ← X − α/2·W(X + Yⁱ⁻¹)
/// ```
///
/// starting from `M = 0`, `v = 1`, `k = 1`. Here `M` tracks `+G`, so the curve
/// is followed backwards.
#[derive(Debug, Clone)]
pub struct CayleyAdam<T> {
    config: CayleyAdamConfig,
    momentum: Matrix<T>,
    second_moment: f64,
    step: u64,
}

impl<T: Scalar> CayleyAdam<T> {
    pub fn new(config: CayleyAdamConfig, rows: usize, cols: usize) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            momentum: Matrix::zeros(rows, cols),
            second_moment: 1.0,
            step: 1,
        })
    }

    /// Resumes with an explicit step counter. The counter must be at least 1
    /// when stepping, since the bias correction vanishes at `k = 0`.
    pub fn with_step_counter(mut self, k: u64) -> Self {
        self.step = k;
        self
    }

    pub fn config(&self) -> &CayleyAdamConfig {
        &self.config
    }

    pub fn set_lr(&mut self, lr: f64) -> Result<()> {
        let mut config = self.config;
        config.lr = lr;
        config.validate()?;
        self.config = config;
        Ok(())
    }

    pub fn momentum(&self) -> &Matrix<T> {
        &self.momentum
    }

    pub fn second_moment(&self) -> f64 {
        self.second_moment
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// `(v, v̂, r)` after folding in a gradient of squared norm `grad_sqr` at
    /// the current step counter.
    pub fn moment_update(&self, grad_sqr: f64) -> Result<(f64, f64, f64)> {
        let k = self.step;
        if k < 1 {
            return Err(Error::InvalidStep(k));
        }
        let cfg = &self.config;
        let v = cfg.beta2 * self.second_moment + (1.0 - cfg.beta2) * grad_sqr;
        let v_hat = v / (1.0 - libm::pow(cfg.beta2, k as f64));
        let r = (1.0 - libm::pow(cfg.beta1, k as f64)) * libm::sqrt(v_hat + cfg.eps);
        Ok((v, v_hat, r))
    }

    /// Advances `x` by one step. On error the optimizer state is untouched.
    pub fn step(&mut self, x: &StiefelPoint<T>, grad: &Matrix<T>) -> Result<CayleyStep<T>> {
        check_gradient(x, &self.momentum, grad)?;
        let cfg = self.config;
        let (v, _, r) = self.moment_update(grad.frobenius_norm_sqr())?;
        let blended = self
            .momentum
            .scale(cfg.beta1)
            .add_scaled(T::from_real(1.0 - cfg.beta1), grad)?;
        let w = build_skew(x, &blended)?.scale(1.0 / r);
        let wx = w.apply(x.matrix())?;
        let projected = wx.scale(r);
        let alpha = adaptive_alpha(cfg.lr, &w, cfg.q, cfg.eps);
        let seed = match cfg.seed {
            AdamSeed::Momentum => &projected,
            AdamSeed::Tangent => &wx,
        };
        let point = retract(x, &w, &wx, seed, alpha, -1.0, cfg.retraction)?;

        self.momentum = projected;
        self.second_moment = v;
        self.step += 1;
        Ok(CayleyStep {
            point,
            alpha,
            skew_norm: w.frobenius_norm(),
        })
    }
}
