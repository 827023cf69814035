//! A small classifier with one row-orthonormal hidden layer.
//!
//! `x ∈ ℝ² → tanh(W₁x + b₁) → tanh(K·h₁ + b₂) → W₃h₂ + b₃ → softmax`, trained
//! full-batch with cross-entropy on two Gaussian blobs. `K` (`h₂ × h₁`) has
//! orthonormal rows and is stored internally as `Kᵀ` in a Stiefel group;
//! everything else sits in a Euclidean group.

use alloc::vec;
use alloc::vec::Vec;

use super::fdcheck::{FdReport, FD_STEP};
use super::project_unchecked;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::optim::{
    group_step, OptimizerFamily, ParamGroup, ADAM_EUCLIDEAN_LR, ADAM_STIEFEL_LR, SGD_EUCLIDEAN_LR,
    SGD_STIEFEL_LR,
};
use crate::rng::{gaussian_matrix, Rng};
use crate::stiefel::{build_skew, cayley_closed, orthonormality_error, random_point, StiefelPoint};

pub const INPUTS: usize = 2;
pub const CLASSES: usize = 2;
/// Stiefel rate of [`TrainingSetup::cayley_sgd`].
pub const TOYNET_SGD_STIEFEL_LR: f64 = 0.1 * SGD_STIEFEL_LR;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyNetConfig {
    pub hidden1: usize,
    pub hidden2: usize,
    pub samples: usize,
    /// Blob centres are `±(separation, separation)`.
    pub separation: f64,
    /// Per-coordinate standard deviation of each blob.
    pub spread: f64,
    /// Seed of the dataset; weights are drawn from the caller's generator.
    pub seed: u64,
}

impl Default for ToyNetConfig {
    fn default() -> Self {
        Self {
            hidden1: 16,
            hidden2: 8,
            samples: 512,
            separation: 1.0,
            spread: 0.5,
            seed: 0,
        }
    }
}

/// How the weights are grouped and stepped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingSetup {
    pub family: OptimizerFamily,
    pub euclidean_lr: f64,
    pub stiefel_lr: f64,
    /// `false` puts `K` in the Euclidean group as well (unconstrained baseline).
    pub constrained: bool,
    /// Tolerance the Stiefel group enforces on `‖KKᵀ − I‖_F`.
    pub ortho_tol: f64,
}

impl TrainingSetup {
    /// Cayley SGD with `β = 0.9`. The Stiefel rate is a tenth of
    /// [`SGD_STIEFEL_LR`]: at the full rate two fixed-point sweeps leave `K`
    /// about `2e-3` off the manifold on this task.
    pub fn cayley_sgd() -> Self {
        Self {
            family: OptimizerFamily::Sgd { beta: 0.9 },
            euclidean_lr: SGD_EUCLIDEAN_LR,
            stiefel_lr: TOYNET_SGD_STIEFEL_LR,
            constrained: true,
            ortho_tol: 1e-5,
        }
    }

    /// Cayley ADAM with `β₁ = 0.9, β₂ = 0.99` and the default group rates.
    pub fn cayley_adam() -> Self {
        Self {
            family: OptimizerFamily::Adam { beta1: 0.9, beta2: 0.99 },
            euclidean_lr: ADAM_EUCLIDEAN_LR,
            stiefel_lr: ADAM_STIEFEL_LR,
            ..Self::cayley_sgd()
        }
    }

    pub fn unconstrained(family: OptimizerFamily, lr: f64) -> Self {
        Self {
            family,
            euclidean_lr: lr,
            stiefel_lr: lr,
            constrained: false,
            ortho_tol: 1e-5,
        }
    }
}

impl Default for TrainingSetup {
    fn default() -> Self {
        Self::cayley_sgd()
    }
}

/// All weights of the network. `s` is the internal `Kᵀ` (`h₁ × h₂`).
#[derive(Debug, Clone, PartialEq)]
pub struct ToyWeights {
    pub w1: Matrix<f64>,
    pub b1: Matrix<f64>,
    pub s: Matrix<f64>,
    pub b2: Matrix<f64>,
    pub w3: Matrix<f64>,
    pub b3: Matrix<f64>,
}

impl ToyWeights {
    fn as_array(&self) -> [&Matrix<f64>; 6] {
        [&self.w1, &self.b1, &self.s, &self.b2, &self.w3, &self.b3]
    }

    fn get_mut(&mut self, i: usize) -> &mut Matrix<f64> {
        match i {
            0 => &mut self.w1,
            1 => &mut self.b1,
            2 => &mut self.s,
            3 => &mut self.b2,
            4 => &mut self.w3,
            _ => &mut self.b3,
        }
    }
}

/// Outcome of one training step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyStep {
    /// Loss before the step.
    pub loss: f64,
    /// Gradient norm before the step, with `K`'s part projected to the
    /// tangent space when it is constrained.
    pub grad_norm: f64,
    /// Guarded step length of the Stiefel group, if there is one.
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ToyNet {
    config: ToyNetConfig,
    inputs: Matrix<f64>,
    labels: Vec<usize>,
    groups: Vec<ParamGroup<f64>>,
    constrained: bool,
}

/// Toy network with the default Cayley SGD setup.
pub fn make_toynet(rng: &mut Rng, config: ToyNetConfig) -> Result<ToyNet> {
    ToyNet::new(rng, config, TrainingSetup::default())
}

fn blobs(config: &ToyNetConfig) -> (Matrix<f64>, Vec<usize>) {
    let mut rng = Rng::new(config.seed);
    let mut inputs = Matrix::zeros(config.samples, INPUTS);
    let mut labels = Vec::with_capacity(config.samples);
    for i in 0..config.samples {
        let class = i % CLASSES;
        let centre = if class == 0 { -config.separation } else { config.separation };
        for j in 0..INPUTS {
            inputs[(i, j)] = centre + config.spread * rng.normal();
        }
        labels.push(class);
    }
    (inputs, labels)
}

impl ToyNet {
    pub fn new(rng: &mut Rng, config: ToyNetConfig, setup: TrainingSetup) -> Result<Self> {
        if config.hidden1 == 0 || config.hidden2 == 0 || config.samples == 0 {
            return Err(Error::InvalidArgument("toy net sizes must be positive"));
        }
        if config.hidden2 > config.hidden1 {
            return Err(Error::InvalidArgument("constrained layer needs p <= n"));
        }
        let (h1, h2) = (config.hidden1, config.hidden2);
        let (inputs, labels) = blobs(&config);

        let w1 = gaussian_matrix::<f64>(rng, h1, INPUTS).scale(1.0 / libm::sqrt(INPUTS as f64));
        let s = random_point::<f64>(rng, h1, h2)?;
        let w3 = gaussian_matrix::<f64>(rng, CLASSES, h2).scale(0.1);
        let mut euclid = vec![w1, Matrix::zeros(h1, 1), Matrix::zeros(h2, 1), w3, Matrix::zeros(CLASSES, 1)];

        let groups = if setup.constrained {
            let s = s.retolerate(setup.ortho_tol)?;
            vec![
                ParamGroup::euclidean(setup.euclidean_lr, setup.family, euclid)?,
                ParamGroup::stiefel(setup.stiefel_lr, setup.family, vec![s])?,
            ]
        } else {
            euclid.push(s.into_matrix());
            vec![ParamGroup::euclidean(setup.euclidean_lr, setup.family, euclid)?]
        };
        Ok(Self {
            config,
            inputs,
            labels,
            groups,
            constrained: setup.constrained,
        })
    }

    pub fn config(&self) -> &ToyNetConfig {
        &self.config
    }

    pub fn inputs(&self) -> &Matrix<f64> {
        &self.inputs
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn groups(&self) -> &[ParamGroup<f64>] {
        &self.groups
    }

    pub fn groups_mut(&mut self) -> &mut [ParamGroup<f64>] {
        &mut self.groups
    }

    pub fn is_constrained(&self) -> bool {
        self.constrained
    }

    pub fn weights(&self) -> ToyWeights {
        let e: Vec<&Matrix<f64>> = self.groups[0].matrices().collect();
        let s = if self.constrained {
            self.groups[1].params()[0].matrix()
        } else {
            e[5]
        };
        ToyWeights {
            w1: e[0].clone(),
            b1: e[1].clone(),
            s: s.clone(),
            b2: e[2].clone(),
            w3: e[3].clone(),
            b3: e[4].clone(),
        }
    }

    /// The constrained weight `K` in its natural `h₂ × h₁` layout.
    pub fn k(&self) -> Matrix<f64> {
        self.weights().s.transpose()
    }

    /// `‖KKᵀ − I‖_F`
    pub fn constrained_error(&self) -> f64 {
        orthonormality_error(&self.weights().s)
    }

    pub fn loss(&self) -> f64 {
        self.evaluate(&self.weights(), false).0
    }

    pub fn loss_and_grads(&self) -> (f64, ToyWeights) {
        let (loss, grads) = self.evaluate(&self.weights(), true);
        (loss, grads.expect("gradients requested"))
    }

    /// Fraction of training points classified correctly.
    pub fn accuracy(&self) -> f64 {
        let w = self.weights();
        let (_, _, logits) = self.forward(&w);
        let correct = (0..self.labels.len())
            .filter(|&i| {
                let row = logits.row(i);
                let pred = if row[1] > row[0] { 1 } else { 0 };
                pred == self.labels[i]
            })
            .count();
        correct as f64 / self.labels.len() as f64
    }

    /// Loss and gradient norm at the current weights, as [`ToyNet::step`]
    /// would report them, without stepping.
    pub fn loss_and_grad_norm(&self) -> Result<(f64, f64)> {
        let w = self.weights();
        let (loss, grads) = self.evaluate(&w, true);
        let g = grads.expect("gradients requested");
        Ok((loss, self.grad_norm(&w, &g)?))
    }

    /// One full-batch step of every group.
    pub fn step(&mut self) -> Result<ToyStep> {
        let w = self.weights();
        let (loss, grads) = self.evaluate(&w, true);
        let g = grads.expect("gradients requested");
        let grad_norm = self.grad_norm(&w, &g)?;
        let euclid = vec![g.w1, g.b1, g.b2, g.w3, g.b3];
        let layout = if self.constrained {
            vec![euclid, vec![g.s]]
        } else {
            let mut all = euclid;
            all.push(g.s);
            vec![all]
        };
        group_step(&mut self.groups, &layout)?;
        let alpha = if self.constrained { self.groups[1].last_alpha() } else { None };
        Ok(ToyStep { loss, grad_norm, alpha })
    }

    fn grad_norm(&self, w: &ToyWeights, g: &ToyWeights) -> Result<f64> {
        let mut sq = 0.0;
        for (i, m) in g.as_array().iter().enumerate() {
            sq += if i == 2 && self.constrained {
                project_unchecked(&w.s, m)?.frobenius_norm_sqr()
            } else {
                m.frobenius_norm_sqr()
            };
        }
        Ok(libm::sqrt(sq))
    }

    /// Directional-derivative check of every weight.
    ///
    /// Euclidean weights are perturbed along random unit directions; a
    /// constrained `K` is moved along the Cayley curve of a random unit
    /// tangent direction and compared with the projected gradient.
    pub fn gradient_check(&self, rng: &mut Rng, trials: usize) -> Result<FdReport> {
        self.gradient_check_scaled(rng, trials, 1.0)
    }

    /// [`ToyNet::gradient_check`] with the analytic gradient multiplied by
    /// `factor`; anything other than one should fail.
    pub fn gradient_check_scaled(&self, rng: &mut Rng, trials: usize, factor: f64) -> Result<FdReport> {
        if trials == 0 {
            return Err(Error::InvalidArgument("gradient check needs at least one trial"));
        }
        let base = self.weights();
        let (_, grads) = self.evaluate(&base, true);
        let grads = grads.expect("gradients requested");
        let mut report = FdReport::default();
        for idx in 0..6 {
            let g = grads.as_array()[idx];
            for _ in 0..trials {
                let (rows, cols) = g.shape();
                let mut plus = base.clone();
                let mut minus = base.clone();
                let analytic;
                if idx == 2 && self.constrained {
                    let x = StiefelPoint::with_tol(base.s.clone(), 1e-4)?;
                    let w = build_skew(&x, &gaussian_matrix(rng, rows, cols))?;
                    let v = w.apply(&base.s)?;
                    let w = w.scale(1.0 / v.frobenius_norm());
                    let v = v.scale(1.0 / v.frobenius_norm());
                    analytic = v.inner(&project_unchecked(&base.s, g)?)?;
                    plus.s = cayley_closed(&x, &w, FD_STEP)?.into_matrix();
                    minus.s = cayley_closed(&x, &w, -FD_STEP)?.into_matrix();
                } else {
                    let d = gaussian_matrix::<f64>(rng, rows, cols);
                    let d = d.scale(1.0 / d.frobenius_norm());
                    analytic = d.inner(g)?;
                    *plus.get_mut(idx) = base.as_array()[idx].add_scaled(FD_STEP, &d)?;
                    *minus.get_mut(idx) = base.as_array()[idx].add_scaled(-FD_STEP, &d)?;
                }
                let analytic = factor * analytic;
                let fp = self.evaluate(&plus, false).0;
                let fm = self.evaluate(&minus, false).0;
                report.record(analytic, (fp - fm) / (2.0 * FD_STEP));
            }
        }
        Ok(report)
    }

    /// `(H₁, H₂, logits)` for the whole dataset, one sample per row.
    fn forward(&self, w: &ToyWeights) -> (Matrix<f64>, Matrix<f64>, Matrix<f64>) {
        let a1 = add_bias(self.inputs.mul_adjoint(&w.w1).expect("shape"), &w.b1);
        let h1 = a1.map(libm::tanh);
        let a2 = add_bias(h1.matmul(&w.s).expect("shape"), &w.b2);
        let h2 = a2.map(libm::tanh);
        let logits = add_bias(h2.mul_adjoint(&w.w3).expect("shape"), &w.b3);
        (h1, h2, logits)
    }

    /// Mean cross-entropy and, if asked, its gradient with respect to every
    /// weight (`s` receives the Euclidean gradient of `Kᵀ`).
    fn evaluate(&self, w: &ToyWeights, with_grad: bool) -> (f64, Option<ToyWeights>) {
        let (h1, h2, logits) = self.forward(w);
        let n = self.labels.len();
        let inv_n = 1.0 / n as f64;
        let mut loss = 0.0;
        let mut dz = Matrix::zeros(n, CLASSES);
        for i in 0..n {
            let row = logits.row(i);
            let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let sum: f64 = row.iter().map(|z| libm::exp(z - m)).sum();
            let lse = m + libm::log(sum);
            loss += lse - row[self.labels[i]];
            for c in 0..CLASSES {
                let prob = libm::exp(row[c] - lse);
                let target = if c == self.labels[i] { 1.0 } else { 0.0 };
                dz[(i, c)] = (prob - target) * inv_n;
            }
        }
        loss *= inv_n;
        if !with_grad {
            return (loss, None);
        }
        let dw3 = dz.adjoint_mul(&h2).expect("shape");
        let db3 = column_sums(&dz);
        let dh2 = dz.matmul(&w.w3).expect("shape");
        let da2 = dh2.zip_with(&h2, "tanh_backward", |g, h| g * (1.0 - h * h)).expect("shape");
        let ds = h1.adjoint_mul(&da2).expect("shape");
        let db2 = column_sums(&da2);
        let dh1 = da2.mul_adjoint(&w.s).expect("shape");
        let da1 = dh1.zip_with(&h1, "tanh_backward", |g, h| g * (1.0 - h * h)).expect("shape");
        let dw1 = da1.adjoint_mul(&self.inputs).expect("shape");
        let db1 = column_sums(&da1);
        let grads = ToyWeights {
            w1: dw1,
            b1: db1,
            s: ds,
            b2: db2,
            w3: dw3,
            b3: db3,
        };
        (loss, Some(grads))
    }
}

fn add_bias(mut a: Matrix<f64>, b: &Matrix<f64>) -> Matrix<f64> {
    for i in 0..a.rows() {
        for (v, bias) in a.row_mut(i).iter_mut().zip(b.as_slice()) {
            *v += bias;
        }
    }
    a
}

fn column_sums(a: &Matrix<f64>) -> Matrix<f64> {
    let mut out = Matrix::zeros(a.cols(), 1);
    for i in 0..a.rows() {
        for (j, v) in a.row(i).iter().enumerate() {
            out[(j, 0)] += v;
        }
    }
    out
}
