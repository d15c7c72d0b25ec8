//! Bayesian linear logistic regression for presence-only data.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: link functions, design offsets, stratum likelihood and
//!   log-posterior;
//! - [`sampler`]: Metropolis-within-Gibbs with augmentation of the
//!   unobserved background labels, and the prevalence estimate it yields;
//! - [`datagen`]: synthetic populations and 1:4 presence/background samples;
//! - [`experiments`]: the replication harness and its summaries.

pub mod datagen;
pub mod error;
pub mod experiments;
pub mod model;
pub mod sampler;
pub mod seed;
pub mod stats;

pub use error::{Error, Result};
