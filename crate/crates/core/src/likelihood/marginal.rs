use crate::error::Result;
use crate::model::PanelData;

use super::{probit_prob, probit_score, Design, GammaVec, LogLik};

/// Univariate probit log-likelihood of equation `i` with coefficients `row`.
pub fn equation_ll(design: &Design, i: usize, row: &[f64]) -> LogLik {
    let q = design.dims().regressors();
    let mut out = LogLik::default();
    for obs in 0..design.n_obs() {
        let z = design.regressors(obs);
        let s: f64 = z.iter().zip(row).map(|(a, b)| a * b).sum();
        out.add_prob(probit_prob(s, design.response(obs, i)));
    }
    debug_assert_eq!(row.len(), q);
    out
}

/// Gradient of [`equation_ll`] in `row`.
pub fn equation_ll_grad(design: &Design, i: usize, row: &[f64]) -> Vec<f64> {
    let mut grad = vec![0.0; row.len()];
    for obs in 0..design.n_obs() {
        let z = design.regressors(obs);
        let s: f64 = z.iter().zip(row).map(|(a, b)| a * b).sum();
        let h = probit_score(s, design.response(obs, i));
        for (g, v) in grad.iter_mut().zip(z) {
            *g += h * v;
        }
    }
    grad
}

/// Marginal pseudo log-likelihood with its floor count.
pub fn marginal_pl_eval(gamma: &GammaVec, data: &PanelData) -> Result<LogLik> {
    let design = Design::new(data, gamma.dims().p)?;
    design.check_gamma(gamma)?;
    Ok((0..design.dims().k)
        .map(|i| equation_ll(&design, i, &gamma.row(i)))
        .fold(LogLik::default(), LogLik::merge))
}

/// `Σ_t Σ_i [Y_{i,t} log Φ(λ_{i,t}) + (1 - Y_{i,t}) log Φ(-λ_{i,t})]`.
pub fn marginal_pl(gamma: &GammaVec, data: &PanelData) -> Result<f64> {
    Ok(marginal_pl_eval(gamma, data)?.value)
}

/// Analytic gradient of [`marginal_pl`] in `GammaVec` order.
pub fn marginal_pl_grad(gamma: &GammaVec, data: &PanelData) -> Result<Vec<f64>> {
    let design = Design::new(data, gamma.dims().p)?;
    design.check_gamma(gamma)?;
    let mut out = vec![0.0; gamma.values().len()];
    for i in 0..design.dims().k {
        let g = equation_ll_grad(&design, i, &gamma.row(i));
        for (m, v) in g.into_iter().enumerate() {
            out[gamma.index(i, m)] = v;
        }
    }
    Ok(out)
}

/// Per-observation score vectors (in `GammaVec` order), path-major.
pub fn marginal_score_terms(gamma: &GammaVec, data: &PanelData) -> Result<Vec<Vec<f64>>> {
    let design = Design::new(data, gamma.dims().p)?;
    design.check_gamma(gamma)?;
    let k = design.dims().k;
    let rows: Vec<Vec<f64>> = (0..k).map(|i| gamma.row(i)).collect();
    Ok((0..design.n_obs())
        .map(|obs| {
            let z = design.regressors(obs);
            let mut score = vec![0.0; gamma.values().len()];
            for (i, row) in rows.iter().enumerate() {
                let s: f64 = z.iter().zip(row).map(|(a, b)| a * b).sum();
                let h = probit_score(s, design.response(obs, i));
                for (m, v) in z.iter().enumerate() {
                    score[gamma.index(i, m)] = h * v;
                }
            }
            score
        })
        .collect())
}
