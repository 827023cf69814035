//! Optimizers.
pub mod cayley;
pub mod euclid;
pub mod group;
pub mod schedule;

pub use cayley::{AdamSeed, CayleyAdam, CayleyAdamConfig, CayleySgd, CayleySgdConfig, CayleyStep, Retraction};
pub use euclid::{EuclidAdam, EuclidAdamConfig, EuclidSgd};
pub use group::{
    group_step, GroupKind, OptimizerFamily, Param, ParamGroup, ADAM_EUCLIDEAN_LR, ADAM_STIEFEL_LR,
    SGD_EUCLIDEAN_LR, SGD_STIEFEL_LR,
};
pub use schedule::lr_schedule;
