//! Spectral regularization in Hilbert scales for statistical inverse learning
//! problems, on synthetic diagonal models where the ground truth is known.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod distance;
pub mod effdim;
pub mod error;
pub mod filters;
pub mod harness;
pub mod index_fn;
pub mod json;
pub mod linalg;
pub mod param_choice;
pub mod sampling;
pub mod spectral_model;
mod svg;
pub mod textfmt;

pub use error::{Error, Result};
pub use index_fn::IndexFunctionSpec;
pub use spectral_model::{
    build_power_problem, Basis, NoiseModel, PowerProblemParams, SmoothnessSpec, SpectralProblem, VPattern,
};
