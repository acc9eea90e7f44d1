use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{two_step, EstimateOptions, EstimationResult};
use crate::error::{invalid, Error, Result};
use crate::model::{simulate_panel, CovariateSource, DEFAULT_BURN_IN};
use crate::rng;
use crate::stats::quantile_sorted;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapOptions {
    /// Number of bootstrap panels, at least 100.
    pub replicates: usize,
    /// Nominal coverage in `(0, 1)`.
    pub level: f64,
    pub seed: u64,
    pub burn_in: usize,
    /// Options of the two-step refits.
    pub estimate: EstimateOptions,
    /// Keep the `B x dim` matrix of replicate estimates in the output.
    pub keep_replicates: bool,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        Self {
            replicates: 1000,
            level: 0.95,
            seed: 0,
            burn_in: DEFAULT_BURN_IN,
            estimate: EstimateOptions::default(),
            keep_replicates: false,
        }
    }
}

/// Basic bootstrap intervals `[2θ̂ - q_{1-a/2}, 2θ̂ - q_{a/2}]` with type-7
/// quantiles of the replicate estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapIntervals {
    pub level: f64,
    pub replicates: usize,
    pub failed: usize,
    pub labels: Vec<String>,
    pub estimate: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicate_matrix: Option<Vec<Vec<f64>>>,
}

/// Parametric bootstrap around `fit`: simulates panels of `n` paths of
/// length `horizon` from the fitted parameters, with covariates drawn from
/// `covariates`, refits each by [`two_step`] and forms basic intervals.
/// Replicate `b` uses its own stream derived from `(seed, b)`. Failed refits
/// are skipped; more than 10% failures is an error.
pub fn bootstrap_ci(
    fit: &EstimationResult,
    covariates: &dyn CovariateSource,
    n: usize,
    horizon: usize,
    opts: &BootstrapOptions,
) -> Result<BootstrapIntervals> {
    if opts.replicates < 100 {
        return Err(invalid(format!("bootstrap needs at least 100 replicates, got {}", opts.replicates)));
    }
    if !(opts.level > 0.0 && opts.level < 1.0) {
        return Err(invalid(format!("level must lie in (0, 1), got {}", opts.level)));
    }
    let params = fit.gamma_hat.to_params(&fit.r_hat)?;
    let estimate_opts = EstimateOptions {
        p: fit.dims.p,
        ..opts.estimate.clone()
    };
    let outcomes: Vec<Option<Vec<f64>>> = (0..opts.replicates)
        .into_par_iter()
        .map(|b| {
            let seed = rng::derive_seed(opts.seed, &[b as u64]);
            simulate_panel(&params, covariates, n, horizon, opts.burn_in, seed)
                .and_then(|panel| two_step(&panel, &estimate_opts))
                .ok()
                .map(|est| est.theta())
        })
        .collect();
    let failed = outcomes.iter().filter(|o| o.is_none()).count();
    if failed * 10 > opts.replicates {
        return Err(Error::TooManyFailures {
            failed,
            total: opts.replicates,
        });
    }
    let draws: Vec<Vec<f64>> = outcomes.into_iter().flatten().collect();
    let theta = fit.theta();
    let alpha = 1.0 - opts.level;
    let mut lower = Vec::with_capacity(theta.len());
    let mut upper = Vec::with_capacity(theta.len());
    for (m, &est) in theta.iter().enumerate() {
        let mut col: Vec<f64> = draws.iter().map(|d| d[m]).collect();
        col.sort_by(f64::total_cmp);
        let q_lo = quantile_sorted(&col, alpha / 2.0);
        let q_hi = quantile_sorted(&col, 1.0 - alpha / 2.0);
        lower.push(2.0 * est - q_hi);
        upper.push(2.0 * est - q_lo);
    }
    Ok(BootstrapIntervals {
        level: opts.level,
        replicates: opts.replicates,
        failed,
        labels: fit.labels(),
        estimate: theta,
        lower,
        upper,
        replicate_matrix: opts.keep_replicates.then_some(draws),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn small_fit() -> (EstimationResult, presets::Design) {
        let d = presets::paper_sec5();
        let panel = simulate_panel(&d.params, &d.covariates, 10, 40, 100, 1).unwrap();
        (two_step(&panel, &EstimateOptions::default()).unwrap(), d)
    }

    #[test]
    fn rejects_small_b_and_bad_level() {
        let (fit, d) = small_fit();
        let opts = BootstrapOptions {
            replicates: 99,
            ..BootstrapOptions::default()
        };
        assert!(bootstrap_ci(&fit, &d.covariates, 10, 40, &opts).is_err());
        let opts = BootstrapOptions {
            replicates: 100,
            level: 1.0,
            ..BootstrapOptions::default()
        };
        assert!(bootstrap_ci(&fit, &d.covariates, 10, 40, &opts).is_err());
    }

    #[test]
    fn intervals_are_ordered_and_reproducible() {
        let (fit, d) = small_fit();
        let opts = BootstrapOptions {
            replicates: 100,
            seed: 7,
            burn_in: 100,
            keep_replicates: true,
            ..BootstrapOptions::default()
        };
        let a = bootstrap_ci(&fit, &d.covariates, 10, 40, &opts).unwrap();
        let b = bootstrap_ci(&fit, &d.covariates, 10, 40, &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.labels.len(), 9);
        assert_eq!(a.replicate_matrix.as_ref().unwrap().len(), 100 - a.failed);
        for m in 0..9 {
            assert!(a.lower[m] < a.upper[m]);
        }
    }
}
