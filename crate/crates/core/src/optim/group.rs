//! Mixed parameter groups.
//!
//! Orthonormal weights live in [`GroupKind::Stiefel`] groups and are stepped
//! with the Cayley optimizers; everything else lives in
//! [`GroupKind::Euclidean`] groups and takes the plain SGD/ADAM update. Each
//! group carries its own learning rate.

use alloc::vec::Vec;

use super::cayley::{CayleyAdam, CayleyAdamConfig, CayleySgd, CayleySgdConfig};
use super::euclid::{EuclidAdam, EuclidAdamConfig, EuclidSgd};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::stiefel::StiefelPoint;

/// Default learning rates for mixed training with Cayley SGD.
pub const SGD_EUCLIDEAN_LR: f64 = 0.01;
pub const SGD_STIEFEL_LR: f64 = 0.2;
/// Default learning rates for mixed training with Cayley ADAM.
pub const ADAM_EUCLIDEAN_LR: f64 = 0.01;
pub const ADAM_STIEFEL_LR: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    Euclidean,
    Stiefel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptimizerFamily {
    Sgd { beta: f64 },
    Adam { beta1: f64, beta2: f64 },
}

#[derive(Debug, Clone)]
enum EuclidOpt<T> {
    Sgd(EuclidSgd<T>),
    Adam(EuclidAdam<T>),
}

#[derive(Debug, Clone)]
enum CayleyOpt<T> {
    Sgd(CayleySgd<T>),
    Adam(CayleyAdam<T>),
}

/// One parameter matrix together with its optimizer state.
#[derive(Debug, Clone)]
pub enum Param<T> {
    Euclidean { value: Matrix<T>, opt: EuclidOptState<T> },
    Stiefel { point: StiefelPoint<T>, opt: CayleyOptState<T> },
}

/// Opaque optimizer state of a Euclidean parameter.
#[derive(Debug, Clone)]
pub struct EuclidOptState<T>(EuclidOpt<T>);

/// Opaque optimizer state of a Stiefel parameter.
#[derive(Debug, Clone)]
pub struct CayleyOptState<T>(CayleyOpt<T>);

impl<T: Scalar> Param<T> {
    pub fn matrix(&self) -> &Matrix<T> {
        match self {
            Param::Euclidean { value, .. } => value,
            Param::Stiefel { point, .. } => point.matrix(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        self.matrix().shape()
    }
}

#[derive(Debug, Clone)]
pub struct ParamGroup<T> {
    kind: GroupKind,
    lr: f64,
    weight_decay: f64,
    family: OptimizerFamily,
    params: Vec<Param<T>>,
    last_alpha: Option<f64>,
}

impl<T: Scalar> ParamGroup<T> {
    pub fn euclidean(lr: f64, family: OptimizerFamily, values: Vec<Matrix<T>>) -> Result<Self> {
        check_lr(lr)?;
        let params = values
            .into_iter()
            .map(|value| {
                let (r, c) = value.shape();
                let opt = match family {
                    OptimizerFamily::Sgd { beta } => EuclidOpt::Sgd(EuclidSgd::new(lr, beta, r, c)),
                    OptimizerFamily::Adam { beta1, beta2 } => {
                        let mut cfg = EuclidAdamConfig::new(lr);
                        cfg.beta1 = beta1;
                        cfg.beta2 = beta2;
                        EuclidOpt::Adam(EuclidAdam::new(cfg, r, c))
                    }
                };
                Param::Euclidean {
                    value,
                    opt: EuclidOptState(opt),
                }
            })
            .collect();
        Ok(Self {
            kind: GroupKind::Euclidean,
            lr,
            weight_decay: 0.0,
            family,
            params,
            last_alpha: None,
        })
    }

    pub fn stiefel(lr: f64, family: OptimizerFamily, points: Vec<StiefelPoint<T>>) -> Result<Self> {
        check_lr(lr)?;
        let mut params = Vec::with_capacity(points.len());
        for point in points {
            let (r, c) = point.shape();
            let opt = match family {
                OptimizerFamily::Sgd { beta } => CayleyOpt::Sgd(CayleySgd::new(CayleySgdConfig::new(lr, beta), r, c)?),
                OptimizerFamily::Adam { beta1, beta2 } => {
                    CayleyOpt::Adam(CayleyAdam::new(CayleyAdamConfig::new(lr, beta1, beta2), r, c)?)
                }
            };
            params.push(Param::Stiefel {
                point,
                opt: CayleyOptState(opt),
            });
        }
        Ok(Self {
            kind: GroupKind::Stiefel,
            lr,
            weight_decay: 0.0,
            family,
            params,
            last_alpha: None,
        })
    }

    /// Adds `weight_decay·X` to every gradient. Only meaningful for Euclidean
    /// groups: Stiefel parameters have fixed norm, so this is rejected there.
    pub fn with_weight_decay(mut self, weight_decay: f64) -> Result<Self> {
        if !(weight_decay >= 0.0) {
            return Err(Error::InvalidArgument("weight decay must be nonnegative"));
        }
        if self.kind == GroupKind::Stiefel && weight_decay != 0.0 {
            return Err(Error::InvalidArgument("weight decay is not defined for Stiefel groups"));
        }
        self.weight_decay = weight_decay;
        Ok(self)
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn lr(&self) -> f64 {
        self.lr
    }

    pub fn family(&self) -> OptimizerFamily {
        self.family
    }

    pub fn set_lr(&mut self, lr: f64) -> Result<()> {
        check_lr(lr)?;
        self.lr = lr;
        Ok(())
    }

    pub fn params(&self) -> &[Param<T>] {
        &self.params
    }

    /// Largest guarded step length used by the last step of a Stiefel group.
    pub fn last_alpha(&self) -> Option<f64> {
        self.last_alpha
    }

    pub fn matrices(&self) -> impl Iterator<Item = &Matrix<T>> {
        self.params.iter().map(Param::matrix)
    }

    fn step(&mut self, grads: &[Matrix<T>]) -> Result<()> {
        let lr = self.lr;
        let wd = self.weight_decay;
        let mut alpha: Option<f64> = None;
        for (param, grad) in self.params.iter_mut().zip(grads) {
            match param {
                Param::Euclidean { value, opt } => {
                    let decayed;
                    let g = if wd != 0.0 {
                        decayed = grad.add_scaled(T::from_real(wd), value)?;
                        &decayed
                    } else {
                        grad
                    };
                    *value = match &mut opt.0 {
                        EuclidOpt::Sgd(o) => {
                            o.lr = lr;
                            o.step(value, g)?
                        }
                        EuclidOpt::Adam(o) => {
                            o.config.lr = lr;
                            o.step(value, g)?
                        }
                    };
                }
                Param::Stiefel { point, opt } => {
                    let out = match &mut opt.0 {
                        CayleyOpt::Sgd(o) => {
                            o.set_lr(lr)?;
                            o.step(point, grad)?
                        }
                        CayleyOpt::Adam(o) => {
                            o.set_lr(lr)?;
                            o.step(point, grad)?
                        }
                    };
                    alpha = Some(alpha.map_or(out.alpha, |a| a.max(out.alpha)));
                    *point = out.point;
                }
            }
        }
        self.last_alpha = alpha;
        Ok(())
    }
}

fn check_lr(lr: f64) -> Result<()> {
    if lr > 0.0 && lr.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument("learning rate must be positive"))
    }
}

/// Steps every parameter of every group with its group's optimizer and rate.
///
/// `grads[g][i]` is the Euclidean gradient of parameter `i` of group `g`.
/// Shapes and finiteness are checked for all groups before anything moves.
pub fn group_step<T: Scalar>(groups: &mut [ParamGroup<T>], grads: &[Vec<Matrix<T>>]) -> Result<()> {
    if groups.len() != grads.len() {
        return Err(Error::InvalidArgument("one gradient list per group is required"));
    }
    for (group, gs) in groups.iter().zip(grads) {
        if group.params.len() != gs.len() {
            return Err(Error::InvalidArgument("one gradient per parameter is required"));
        }
        for (p, g) in group.params.iter().zip(gs) {
            if p.shape() != g.shape() {
                return Err(Error::DimensionMismatch {
                    op: "group_step",
                    left: p.shape(),
                    right: g.shape(),
                });
            }
            if !g.is_finite() {
                return Err(Error::NonFiniteGradient);
            }
        }
    }
    for (group, gs) in groups.iter_mut().zip(grads) {
        group.step(gs)?;
    }
    Ok(())
}
