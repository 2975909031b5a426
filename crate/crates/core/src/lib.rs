//! Learned eigenvalue perturbation of RANS Reynolds stresses.
//!
//! The crate maps Reynolds stress anisotropy onto the barycentric
//! realizability triangle, builds rotation-invariant flow features, trains a
//! small fully connected network to predict the eigenvalue perturbation
//! magnitude `Δ_B`, and applies that magnitude to produce perturbed stress
//! fields toward the three limiting states.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod tensor;

pub use error::{Error, Result};
pub mod dataset;
pub mod features;
pub mod nn;
pub mod perturb;
pub mod synthetic;
