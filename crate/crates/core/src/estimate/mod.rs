//! Estimation pipelines: count-based starting values, the two-step
//! (marginal then pairwise) estimator, the one-step full pseudo-likelihood
//! estimator, parametric bootstrap intervals and Monte-Carlo replication.

mod bootstrap;
mod fit;
mod init;
mod replicate;

pub use bootstrap::{bootstrap_ci, BootstrapIntervals, BootstrapOptions};
pub use fit::{one_step, two_step};
pub use init::{init_gamma, init_r, InitGuess, INIT_R_CLIP};
pub use replicate::{replicate, ReplicationRow, ReplicationTable};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::likelihood::{CorrParam, GammaVec, DEFAULT_GHK_DRAWS};
use crate::model::Dims;
use crate::optim::{OptimOptions, MAX_ROW_NORM};

/// Pairwise correlations are searched on `[-R_BOUND, R_BOUND]`.
pub const R_BOUND: f64 = MAX_ROW_NORM;

/// Distance from `±R_BOUND` at which an estimate is flagged.
pub const BOUNDARY_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    TwoStep,
    OneStep,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::TwoStep => "two-step",
            Method::OneStep => "one-step",
        })
    }
}

/// Where the one-step search starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OneStepStart {
    /// The two-step estimate.
    #[default]
    TwoStep,
    /// The count-based starting values.
    Init,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateOptions {
    /// Lag order `p`.
    pub p: usize,
    pub optim: OptimOptions,
    /// Tolerance of the scalar correlation searches.
    pub brent_tol: f64,
    /// GHK draws for the one-step objective when `k >= 3`.
    pub ghk_draws: usize,
    /// Seed of the GHK uniform block.
    pub ghk_seed: u64,
    pub one_step_start: OneStepStart,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            p: 1,
            optim: OptimOptions::default(),
            brent_tol: 1e-8,
            ghk_draws: DEFAULT_GHK_DRAWS,
            ghk_seed: 0,
            one_step_start: OneStepStart::TwoStep,
        }
    }
}

/// Optimizer record for one Nelder–Mead run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchDiagnostics {
    pub iterations: usize,
    pub evaluations: usize,
    pub restarts: usize,
    pub converged: bool,
}

/// Outcome of one scalar correlation search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDiagnostics {
    pub i: usize,
    pub j: usize,
    pub r: f64,
    pub objective: f64,
    pub at_boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Diagnostics {
    /// One entry per equation (two-step) or a single entry (one-step).
    pub searches: Vec<SearchDiagnostics>,
    pub pairs: Vec<PairDiagnostics>,
    /// Shrinkage weight `α` used to restore positive definiteness.
    pub pd_repair_alpha: Option<f64>,
    /// Log-probabilities that hit the floor at the reported estimate.
    pub clamped_terms: usize,
    pub notes: Vec<String>,
}

/// Point estimates with diagnostics and, optionally, bootstrap intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub method: Method,
    pub dims: Dims,
    pub gamma_hat: GammaVec,
    pub r_hat: CorrParam,
    /// Marginal pseudo log-likelihood (two-step) or full pseudo
    /// log-likelihood (one-step) at the estimate.
    pub objective_value: f64,
    pub diagnostics: Diagnostics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<BootstrapIntervals>,
}

impl EstimationResult {
    /// Parameter names: `γ` entries in vector order followed by `r`.
    pub fn labels(&self) -> Vec<String> {
        let mut out = self.gamma_hat.labels();
        out.extend(self.r_hat.labels());
        out
    }

    /// `(γ̂, r̂)` concatenated.
    pub fn theta(&self) -> Vec<f64> {
        let mut out = self.gamma_hat.values().to_vec();
        out.extend_from_slice(self.r_hat.values());
        out
    }

    pub fn any_boundary(&self) -> bool {
        self.r_hat.values().iter().any(|r| r.abs() >= R_BOUND - BOUNDARY_MARGIN)
    }

    /// Human-readable statistical warnings (boundary estimates, PD repair).
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for pair in &self.diagnostics.pairs {
            if pair.at_boundary {
                out.push(format!("R({},{}) estimate {} is at the search boundary", pair.i + 1, pair.j + 1, pair.r));
            }
        }
        if self.diagnostics.pairs.is_empty() && self.any_boundary() {
            out.push("a correlation estimate is at the search boundary".to_string());
        }
        if let Some(alpha) = self.diagnostics.pd_repair_alpha {
            out.push(format!("pairwise correlation matrix was not positive definite; shrunk toward I with alpha = {alpha}"));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parses and validates a JSON document written by [`Self::to_json`].
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Self = serde_json::from_str(text)?;
        let gamma = GammaVec::new(raw.dims, raw.gamma_hat.values().to_vec())?;
        if gamma.dims() != raw.gamma_hat.dims() {
            return Err(invalid("gamma dimensions disagree with the result dimensions"));
        }
        let r_hat = CorrParam::new(raw.dims.k, raw.r_hat.values().to_vec())?;
        Ok(Self {
            gamma_hat: gamma,
            r_hat,
            ..raw
        })
    }
}

/// Shrinks `R` toward the identity, `αR + (1-α)I` for `α = 0.99, 0.98, ...`,
/// until it is positive definite. Returns the repaired matrix and `α`.
pub(crate) fn shrink_to_pd(corr: &CorrParam) -> (CorrParam, f64) {
    for step in 1..=100 {
        let alpha = 1.0 - 0.01 * step as f64;
        let shrunk: Vec<f64> = corr.values().iter().map(|r| alpha * r).collect();
        let cand = CorrParam::new_unchecked(corr.k(), shrunk).expect("shrinking keeps |r| < 1");
        if cand.is_positive_definite() {
            return (cand, alpha);
        }
    }
    (CorrParam::identity(corr.k()), 0.0)
}
