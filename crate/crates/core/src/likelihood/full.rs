use crate::error::{invalid, Result};
use crate::gauss::{rect2_unchecked, GhkSampler, Rect2Spec};
use crate::model::PanelData;

use super::{marginal::equation_ll, CorrParam, Design, GammaVec, LogLik};

/// GHK draws used when the caller does not choose.
pub const DEFAULT_GHK_DRAWS: usize = 2000;

/// How joint rectangle probabilities are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FullPlMode {
    /// Exact for `k <= 2` (univariate CDF or 1-D quadrature), GHK above.
    #[default]
    Auto,
    /// GHK for every `k >= 2`.
    Ghk,
}

/// The full pseudo log-likelihood over a fixed data set, with a fixed GHK
/// uniform block so that it is a deterministic function of the parameters.
#[derive(Debug, Clone)]
pub struct FullObjective {
    design: Design,
    sampler: Option<GhkSampler>,
}

impl FullObjective {
    pub fn new(data: &PanelData, p: usize, mode: FullPlMode, ghk_draws: usize, seed: u64) -> Result<Self> {
        let design = Design::new(data, p)?;
        let k = design.dims().k;
        let use_ghk = match mode {
            FullPlMode::Auto => k >= 3,
            FullPlMode::Ghk => k >= 2,
        };
        let sampler = if use_ghk {
            Some(GhkSampler::new(k, ghk_draws, seed)?)
        } else {
            None
        };
        Ok(Self { design, sampler })
    }

    pub fn design(&self) -> &Design {
        &self.design
    }

    pub fn eval(&self, gamma: &GammaVec, corr: &CorrParam) -> Result<LogLik> {
        self.design.check_gamma(gamma)?;
        let k = self.design.dims().k;
        if corr.k() != k {
            return Err(invalid("correlation dimension does not match gamma"));
        }
        let chol = corr.cholesky_lower()?;
        if k == 1 {
            return Ok(equation_ll(&self.design, 0, &gamma.row(0)));
        }
        let lam = self.design.predictors(gamma.values());
        let mut out = LogLik::default();
        match &self.sampler {
            Some(sampler) => {
                for obs in 0..self.design.n_obs() {
                    let est = sampler.estimate(&lam[obs * k..(obs + 1) * k], &chol, self.design.responses(obs));
                    out.add_prob(est.prob);
                }
            }
            None => {
                let r = corr.get(0, 1);
                for obs in 0..self.design.n_obs() {
                    let y = self.design.responses(obs);
                    out.add_prob(rect2_unchecked(&Rect2Spec::new(lam[obs * 2], lam[obs * 2 + 1], r, y[0], y[1])));
                }
            }
        }
        Ok(out)
    }
}

/// Full pseudo log-likelihood `Σ_t log P(Y_t | past)` with the chosen mode.
pub fn full_pl_with(
    gamma: &GammaVec,
    corr: &CorrParam,
    data: &PanelData,
    mode: FullPlMode,
    ghk_draws: usize,
    seed: u64,
) -> Result<LogLik> {
    FullObjective::new(data, gamma.dims().p, mode, ghk_draws, seed)?.eval(gamma, corr)
}

/// Full pseudo log-likelihood; exact for `k <= 2`, GHK with common random
/// numbers from `seed` otherwise.
pub fn full_pl(gamma: &GammaVec, corr: &CorrParam, data: &PanelData, ghk_draws: usize, seed: u64) -> Result<f64> {
    Ok(full_pl_with(gamma, corr, data, FullPlMode::Auto, ghk_draws, seed)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::rect2;
    use crate::likelihood::marginal_pl;
    use crate::model::{simulate_panel, CovariateModel, Dims, ModelParams};
    use crate::presets;
    use nalgebra::{DMatrix, DVector};

    fn sec5_panel(n: usize, t: usize, seed: u64) -> PanelData {
        let d = presets::paper_sec5();
        simulate_panel(&d.params, &d.covariates, n, t, 100, seed).unwrap()
    }

    #[test]
    fn univariate_equals_marginal() {
        let params = ModelParams::new(
            vec![DMatrix::from_element(1, 1, 0.4)],
            DMatrix::zeros(1, 0),
            DVector::from_element(1, -0.1),
            DMatrix::identity(1, 1),
        )
        .unwrap();
        let panel = simulate_panel(&params, &CovariateModel::none(), 3, 80, 50, 1).unwrap();
        let gamma = GammaVec::from_params(&params);
        let full = full_pl(&gamma, &CorrParam::identity(1), &panel, 500, 2).unwrap();
        assert_eq!(full, marginal_pl(&gamma, &panel).unwrap());
    }

    #[test]
    fn identity_correlation_equals_marginal() {
        let panel = sec5_panel(4, 60, 3);
        let gamma = GammaVec::from_params(&presets::paper_sec5().params);
        let full = full_pl(&gamma, &CorrParam::identity(2), &panel, 500, 2).unwrap();
        let marg = marginal_pl(&gamma, &panel).unwrap();
        assert!((full - marg).abs() < 1e-8, "{full} vs {marg}");
    }

    #[test]
    fn bivariate_is_sum_of_rect2_logs() {
        let panel = sec5_panel(2, 40, 4);
        let gamma = GammaVec::from_params(&presets::paper_sec5().params);
        let corr = CorrParam::new(2, vec![-0.2]).unwrap();
        let full = full_pl(&gamma, &corr, &panel, 500, 1).unwrap();
        let design = Design::new(&panel, 1).unwrap();
        let lam = design.predictors(gamma.values());
        let direct: f64 = (0..design.n_obs())
            .map(|o| {
                let y = design.responses(o);
                rect2(&Rect2Spec::new(lam[2 * o], lam[2 * o + 1], -0.2, y[0], y[1])).unwrap().ln()
            })
            .sum();
        assert!((full - direct).abs() < 1e-10);
    }

    #[test]
    fn ghk_mode_is_deterministic_and_nonpositive() {
        let panel = sec5_panel(2, 40, 5);
        let gamma = GammaVec::from_params(&presets::paper_sec5().params);
        let corr = CorrParam::new(2, vec![-0.2]).unwrap();
        let a = full_pl_with(&gamma, &corr, &panel, FullPlMode::Ghk, 1000, 9).unwrap();
        let b = full_pl_with(&gamma, &corr, &panel, FullPlMode::Ghk, 1000, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.value <= 0.0);
    }

    #[test]
    fn trivariate_independent_equals_marginal() {
        let dims = Dims::new(1, 3, 0).unwrap();
        let params = ModelParams::new(
            vec![DMatrix::from_row_slice(3, 3, &[0.3, 0.1, 0.0, -0.2, 0.4, 0.1, 0.0, 0.2, 0.5])],
            DMatrix::zeros(3, 0),
            DVector::from_vec(vec![0.1, -0.3, 0.2]),
            DMatrix::identity(3, 3),
        )
        .unwrap();
        let panel = simulate_panel(&params, &CovariateModel::none(), 2, 50, 50, 6).unwrap();
        let gamma = GammaVec::from_params(&params);
        assert_eq!(gamma.dims(), dims);
        let full = full_pl(&gamma, &CorrParam::identity(3), &panel, 200, 1).unwrap();
        let marg = marginal_pl(&gamma, &panel).unwrap();
        assert!((full - marg).abs() < 1e-8);
    }

    #[test]
    fn rejects_non_pd_correlation() {
        let panel = sec5_panel(1, 10, 7);
        let gamma = GammaVec::zeros(Dims::new(1, 2, 1).unwrap());
        let bad = CorrParam::new_unchecked(2, vec![0.5]).unwrap();
        assert!(full_pl(&gamma, &bad, &panel, 200, 1).is_ok());
        let gamma3 = GammaVec::zeros(Dims::new(1, 3, 0).unwrap());
        let bad3 = CorrParam::new_unchecked(3, vec![0.9, -0.9, 0.9]).unwrap();
        let panel3 = PanelData::from(crate::model::PathData::from_rows(&[vec![0, 1, 0], vec![1, 1, 0]], &[]).unwrap());
        assert!(full_pl(&gamma3, &bad3, &panel3, 200, 1).is_err());
    }
}
