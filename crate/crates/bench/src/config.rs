//! Experiment configuration and per-problem defaults.

use clap::ValueEnum;
use stiefel_core::optim::{ADAM_EUCLIDEAN_LR, SGD_EUCLIDEAN_LR};
use stiefel_core::problems::toynet::TOYNET_SGD_STIEFEL_LR;
use stiefel_core::optim::ADAM_STIEFEL_LR;
use stiefel_core::stiefel::{DEFAULT_EPS, DEFAULT_ITERATIONS, DEFAULT_Q};

use crate::exit::{usage, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProblemKind {
    Procrustes,
    Subspace,
    Toynet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OptimizerKind {
    CayleySgd,
    CayleyAdam,
    Sgd,
    Adam,
}

impl OptimizerKind {
    pub fn is_cayley(self) -> bool {
        matches!(self, OptimizerKind::CayleySgd | OptimizerKind::CayleyAdam)
    }

    pub fn is_adam(self) -> bool {
        matches!(self, OptimizerKind::CayleyAdam | OptimizerKind::Adam)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum ScalarKind {
    #[default]
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum RetractionKind {
    #[default]
    Iterative,
    Closed,
}

/// Everything that determines an `optimize` run. Two runs with equal
/// configs write identical CSV apart from the `wall_ms` column.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub optimizer: OptimizerKind,
    /// Rows of the variable; hidden width of the first layer for `toynet`.
    pub n: usize,
    /// Columns of the variable; hidden width of the second layer for `toynet`.
    pub p: usize,
    pub steps: u64,
    pub seed: u64,
    pub lr: f64,
    /// Rate of the constrained layer of `toynet`; unused elsewhere.
    pub lr_stiefel: f64,
    pub beta: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub q: f64,
    pub eps: f64,
    pub s: usize,
    pub retraction: RetractionKind,
    pub scalar: ScalarKind,
    pub log_every: u64,
    pub ortho_tol: f64,
}

impl ExperimentConfig {
    pub fn new(problem: ProblemKind, optimizer: OptimizerKind) -> Self {
        use OptimizerKind::*;
        use ProblemKind::*;
        let (n, p) = match problem {
            Procrustes => (16, 16),
            Subspace => (50, 5),
            Toynet => (16, 8),
        };
        let (lr, lr_stiefel) = match (problem, optimizer) {
            (Subspace, CayleySgd | Sgd) => (2e-4, 0.0),
            (Subspace, CayleyAdam | Adam) => (0.02, 0.0),
            (Procrustes, CayleySgd) => (0.01, 0.0),
            (Procrustes, Sgd) => (1e-3, 0.0),
            (Procrustes, CayleyAdam | Adam) => (0.02, 0.0),
            (Toynet, CayleySgd) => (SGD_EUCLIDEAN_LR, TOYNET_SGD_STIEFEL_LR),
            (Toynet, CayleyAdam) => (ADAM_EUCLIDEAN_LR, ADAM_STIEFEL_LR),
            (Toynet, Sgd) => (SGD_EUCLIDEAN_LR, SGD_EUCLIDEAN_LR),
            (Toynet, Adam) => (ADAM_EUCLIDEAN_LR, ADAM_EUCLIDEAN_LR),
        };
        // A small q bounds the drift of each saturated step; Procrustes with
        // momentum saturates the guard for most of the run.
        let q = if (problem, optimizer) == (Procrustes, CayleySgd) { 0.02 } else { DEFAULT_Q };
        Self {
            problem,
            optimizer,
            n,
            p,
            steps: 1000,
            seed: 0,
            lr,
            lr_stiefel,
            beta: 0.9,
            beta1: 0.9,
            beta2: 0.99,
            q,
            eps: DEFAULT_EPS,
            s: DEFAULT_ITERATIONS,
            retraction: RetractionKind::Iterative,
            scalar: ScalarKind::Real,
            log_every: 1,
            ortho_tol: 1e-4,
        }
    }

    pub fn validate(&self) -> Result<(), Failure> {
        positive("lr", self.lr)?;
        if self.problem == ProblemKind::Toynet {
            positive("lr-stiefel", self.lr_stiefel)?;
        }
        unit_interval("beta", self.beta, true)?;
        unit_interval("beta1", self.beta1, true)?;
        unit_interval("beta2", self.beta2, true)?;
        unit_interval("q", self.q, false)?;
        positive("eps", self.eps)?;
        positive("ortho-tol", self.ortho_tol)?;
        if self.log_every == 0 {
            return Err(usage("--log-every must be at least 1"));
        }
        if self.n == 0 || self.p == 0 {
            return Err(usage("--n and --p must be positive"));
        }
        if self.p > self.n {
            return Err(usage(format!("--p {} exceeds --n {}", self.p, self.n)));
        }
        match self.problem {
            ProblemKind::Procrustes if self.p != self.n => {
                Err(usage("procrustes is square: --p must equal --n"))
            }
            ProblemKind::Toynet if self.scalar == ScalarKind::Complex => Err(usage("toynet is real-valued")),
            _ => Ok(()),
        }
    }
}

pub fn positive(name: &str, v: f64) -> Result<(), Failure> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(usage(format!("--{name} must be a positive finite number, got {v}")))
    }
}

/// `[0, 1)` when `closed_low`, otherwise `(0, 1)`.
pub fn unit_interval(name: &str, v: f64, closed_low: bool) -> Result<(), Failure> {
    let low_ok = if closed_low { v >= 0.0 } else { v > 0.0 };
    if low_ok && v < 1.0 {
        Ok(())
    } else {
        Err(usage(format!("--{name} must lie in the unit interval, got {v}")))
    }
}
