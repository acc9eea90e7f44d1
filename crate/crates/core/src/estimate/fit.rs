use rayon::prelude::*;

use super::{
    init_gamma, init_r, shrink_to_pd, Diagnostics, EstimateOptions, EstimationResult, Method, OneStepStart,
    PairDiagnostics, SearchDiagnostics, BOUNDARY_MARGIN, R_BOUND,
};
use crate::error::{Error, Result};
use crate::likelihood::{
    equation_ll, marginal_pl_eval, pairs, CorrParam, Design, FullObjective, FullPlMode, GammaVec, PairwiseObjective,
};
use crate::model::PanelData;
use crate::optim::{brent_max, corr_transform, corr_untransform, nelder_mead, NelderMeadResult};

fn search_record(res: &NelderMeadResult) -> SearchDiagnostics {
    SearchDiagnostics {
        iterations: res.iterations,
        evaluations: res.evaluations,
        restarts: res.restarts,
        converged: res.converged,
    }
}

/// Two-step estimator.
///
/// Step 1 maximizes the marginal pseudo log-likelihood one equation at a
/// time by Nelder–Mead from the count-based starting values. Step 2 fixes
/// `γ̂` and maximizes each pairwise log-likelihood over `r_ij` in
/// `[-0.9987, 0.9987]`. A non positive definite assembly is shrunk toward
/// the identity and flagged.
pub fn two_step(data: &PanelData, opts: &EstimateOptions) -> Result<EstimationResult> {
    let design = Design::new(data, opts.p)?;
    let init = init_gamma(data, opts.p)?;
    let dims = design.dims();

    let fits = (0..dims.k)
        .into_par_iter()
        .map(|i| {
            nelder_mead(
                |row: &[f64]| equation_ll(&design, i, row).value,
                &init.gamma.row(i),
                &opts.optim,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let mut gamma = GammaVec::zeros(dims);
    for (i, fit) in fits.iter().enumerate() {
        gamma.set_row(i, &fit.x);
    }

    let pair_fits = pairs(dims.k)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(i, j)| {
            let obj = PairwiseObjective::new(&design, &gamma, (i, j))?;
            let (r, value) = brent_max(
                |r| obj.value(r).unwrap_or(f64::NEG_INFINITY),
                -R_BOUND,
                R_BOUND,
                opts.brent_tol,
            );
            if !value.is_finite() {
                return Err(Error::Numerical(format!("pairwise objective for ({}, {}) is not finite", i + 1, j + 1)));
            }
            Ok(PairDiagnostics {
                i,
                j,
                r,
                objective: value,
                at_boundary: r.abs() >= R_BOUND - BOUNDARY_MARGIN,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let raw = CorrParam::new_unchecked(dims.k, pair_fits.iter().map(|p| p.r).collect())?;
    let (r_hat, pd_repair_alpha) = if raw.is_positive_definite() {
        (raw, None)
    } else {
        let (fixed, alpha) = shrink_to_pd(&raw);
        (fixed, Some(alpha))
    };

    let marginal = marginal_pl_eval(&gamma, data)?;
    Ok(EstimationResult {
        method: Method::TwoStep,
        dims,
        gamma_hat: gamma,
        r_hat,
        objective_value: marginal.value,
        diagnostics: Diagnostics {
            searches: fits.iter().map(search_record).collect(),
            pairs: pair_fits,
            pd_repair_alpha,
            clamped_terms: marginal.clamped,
            notes: init.notes,
        },
        bootstrap: None,
    })
}

/// One-step estimator: Nelder–Mead on the full pseudo log-likelihood over
/// `(γ, u)`, where `u` are the unconstrained correlation coordinates of
/// [`corr_transform`]. Starts from the two-step estimate by default.
pub fn one_step(data: &PanelData, opts: &EstimateOptions) -> Result<EstimationResult> {
    let objective = FullObjective::new(data, opts.p, FullPlMode::Auto, opts.ghk_draws, opts.ghk_seed)?;
    let dims = objective.design().dims();
    let k = dims.k;
    let mut notes = Vec::new();
    let (gamma0, corr0) = match opts.one_step_start {
        OneStepStart::TwoStep => {
            let start = two_step(data, opts)?;
            notes.extend(start.diagnostics.notes);
            (start.gamma_hat, start.r_hat)
        }
        OneStepStart::Init => {
            let init = init_gamma(data, opts.p)?;
            notes.extend(init.notes);
            (init.gamma, init_r(data))
        }
    };
    let u0 = match corr_untransform(&corr0) {
        Ok(u) => u,
        Err(_) => {
            notes.push("starting correlation too close to singular; shrunk toward I".to_string());
            let shrunk = CorrParam::new_unchecked(k, corr0.values().iter().map(|r| 0.9 * r).collect())?;
            corr_untransform(&shrunk)?
        }
    };
    let n_gamma = dims.gamma_len();
    let mut x0 = gamma0.values().to_vec();
    x0.extend(u0);

    let eval = |x: &[f64]| -> Result<f64> {
        let gamma = GammaVec::new(dims, x[..n_gamma].to_vec())?;
        let corr = corr_transform(k, &x[n_gamma..])?;
        Ok(objective.eval(&gamma, &corr)?.value)
    };
    let res = nelder_mead(|x| eval(x).unwrap_or(f64::NEG_INFINITY), &x0, &opts.optim)?;

    let gamma_hat = GammaVec::new(dims, res.x[..n_gamma].to_vec())?;
    let r_hat = corr_transform(k, &res.x[n_gamma..])?;
    let value = objective.eval(&gamma_hat, &r_hat)?;
    Ok(EstimationResult {
        method: Method::OneStep,
        dims,
        gamma_hat,
        r_hat,
        objective_value: value.value,
        diagnostics: Diagnostics {
            searches: vec![search_record(&res)],
            pairs: Vec::new(),
            pd_repair_alpha: None,
            clamped_terms: value.clamped,
            notes,
        },
        bootstrap: None,
    })
}
