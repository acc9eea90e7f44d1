use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{one_step, two_step, EstimateOptions, Method};
use crate::error::{invalid, Error, Result};
use crate::likelihood::{CorrParam, GammaVec};
use crate::model::simulate_panel;
use crate::presets::Design;
use crate::rng;

/// Summary of one parameter over the Monte-Carlo replicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRow {
    pub parameter: String,
    pub truth: f64,
    pub mean: f64,
    pub mse: f64,
    pub bias: f64,
    /// Variance with divisor `S`, so that `mse = bias² + variance`.
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationTable {
    pub method: Method,
    pub sims: usize,
    pub failed: usize,
    pub rows: Vec<ReplicationRow>,
    /// Estimates of every successful replicate, in label order.
    #[serde(skip)]
    pub estimates: Vec<Vec<f64>>,
}

/// Simulates `sims` panels of the design's shape and refits each. Replicate
/// `s` uses the stream derived from `(seed, s)`.
pub fn replicate(
    design: &Design,
    sims: usize,
    burn_in: usize,
    method: Method,
    opts: &EstimateOptions,
    seed: u64,
) -> Result<ReplicationTable> {
    if sims == 0 {
        return Err(invalid("need at least one replicate"));
    }
    let dims = design.params.dims();
    let opts = EstimateOptions { p: dims.p, ..opts.clone() };
    let truth_gamma = GammaVec::from_params(&design.params);
    let truth_r = CorrParam::from_matrix(design.params.r())?;
    let mut truth = truth_gamma.values().to_vec();
    truth.extend_from_slice(truth_r.values());
    let mut labels = truth_gamma.labels();
    labels.extend(truth_r.labels());

    let outcomes: Vec<Option<Vec<f64>>> = (0..sims)
        .into_par_iter()
        .map(|s| {
            let panel = simulate_panel(
                &design.params,
                &design.covariates,
                design.n,
                design.horizon,
                burn_in,
                rng::derive_seed(seed, &[s as u64]),
            )
            .ok()?;
            let fit = match method {
                Method::TwoStep => two_step(&panel, &opts),
                Method::OneStep => one_step(&panel, &opts),
            };
            fit.ok().map(|f| f.theta())
        })
        .collect();
    let failed = outcomes.iter().filter(|o| o.is_none()).count();
    let estimates: Vec<Vec<f64>> = outcomes.into_iter().flatten().collect();
    if estimates.is_empty() {
        return Err(Error::TooManyFailures { failed, total: sims });
    }
    let count = estimates.len() as f64;
    let rows = labels
        .into_iter()
        .enumerate()
        .map(|(m, parameter)| {
            let mean = estimates.iter().map(|e| e[m]).sum::<f64>() / count;
            let variance = estimates.iter().map(|e| (e[m] - mean).powi(2)).sum::<f64>() / count;
            let mse = estimates.iter().map(|e| (e[m] - truth[m]).powi(2)).sum::<f64>() / count;
            ReplicationRow {
                parameter,
                truth: truth[m],
                mean,
                mse,
                bias: mean - truth[m],
                variance,
            }
        })
        .collect();
    Ok(ReplicationTable {
        method,
        sims,
        failed,
        rows,
        estimates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn small_replication_is_consistent() {
        let mut d = presets::paper_sec5();
        d.n = 5;
        d.horizon = 40;
        let t = replicate(&d, 3, 100, Method::TwoStep, &EstimateOptions::default(), 1).unwrap();
        assert_eq!(t.rows.len(), 9);
        assert_eq!(t.rows[0].parameter, "C(1)");
        for row in &t.rows {
            assert!((row.mse - (row.bias * row.bias + row.variance)).abs() < 1e-12);
        }
        let again = replicate(&d, 3, 100, Method::TwoStep, &EstimateOptions::default(), 1).unwrap();
        assert_eq!(t, again);
        assert!(replicate(&d, 0, 100, Method::TwoStep, &EstimateOptions::default(), 1).is_err());
    }
}
