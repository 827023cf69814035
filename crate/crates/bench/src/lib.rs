//! Experiment harness for `stiefel-core`.
//!
//! Every command of the `stiefelbench` binary is a library function here so
//! that tests can run the same code without spawning a process.

pub mod cli;
pub mod config;
pub mod csvout;
pub mod exit;
pub mod gradcheck;
pub mod optimize;
pub mod retraction;
pub mod speed;
pub mod unitary;

pub use exit::{ExitStatus, Failure};
