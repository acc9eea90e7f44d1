//! Multivariate autoregressive probit models for binary time series and
//! panels: simulation (forward and perfect), marginal / pairwise / full
//! pseudo-likelihoods, two-step and one-step estimation, parametric bootstrap
//! intervals, and the data preparation pipeline.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimate;
pub mod gauss;
pub mod likelihood;
pub mod linalg;
pub mod model;
pub mod optim;
pub mod panel_data;
pub mod presets;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use estimate::{
    bootstrap_ci, one_step, two_step, BootstrapOptions, EstimationResult, EstimateOptions, Method,
};
pub use likelihood::{CorrParam, GammaVec};
pub use model::{Dims, LagState, ModelParams, PanelData, PathData};
