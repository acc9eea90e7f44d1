use crate::error::{invalid, Result};
use crate::gauss::{rect2_dr_unchecked, rect2_unchecked, Rect2Spec};
use crate::model::PanelData;

use super::{CorrParam, Design, GammaVec, LogLik, PROB_FLOOR};

/// Pairwise log-likelihood of coordinates `(i, j)` as a function of their
/// noise correlation, with the predictors fixed.
#[derive(Debug, Clone)]
pub struct PairwiseObjective {
    lam_i: Vec<f64>,
    lam_j: Vec<f64>,
    y_i: Vec<u8>,
    y_j: Vec<u8>,
}

impl PairwiseObjective {
    pub fn new(design: &Design, gamma: &GammaVec, pair: (usize, usize)) -> Result<Self> {
        design.check_gamma(gamma)?;
        let (i, j) = pair;
        let k = design.dims().k;
        if !(i < j && j < k) {
            return Err(invalid(format!("pair ({i}, {j}) needs i < j < k = {k}")));
        }
        let n = design.n_obs();
        Ok(Self {
            lam_i: design.equation_predictor(&gamma.row(i)),
            lam_j: design.equation_predictor(&gamma.row(j)),
            y_i: (0..n).map(|o| design.response(o, i)).collect(),
            y_j: (0..n).map(|o| design.response(o, j)).collect(),
        })
    }

    pub fn n_obs(&self) -> usize {
        self.lam_i.len()
    }

    fn spec(&self, obs: usize, r: f64) -> Rect2Spec {
        Rect2Spec::new(self.lam_i[obs], self.lam_j[obs], r, self.y_i[obs], self.y_j[obs])
    }

    fn check(r: f64) -> Result<()> {
        if !(r.abs() < 1.0) {
            return Err(invalid(format!("correlation {r} outside (-1, 1)")));
        }
        Ok(())
    }

    pub fn eval(&self, r: f64) -> Result<LogLik> {
        Self::check(r)?;
        let mut out = LogLik::default();
        for obs in 0..self.n_obs() {
            out.add_prob(rect2_unchecked(&self.spec(obs, r)));
        }
        Ok(out)
    }

    pub fn value(&self, r: f64) -> Result<f64> {
        Ok(self.eval(r)?.value)
    }

    /// Per-observation `∂ log P_t / ∂r`; zero where the probability is floored.
    pub fn dr_terms(&self, r: f64) -> Result<Vec<f64>> {
        Self::check(r)?;
        Ok((0..self.n_obs())
            .map(|obs| {
                let spec = self.spec(obs, r);
                let p = rect2_unchecked(&spec);
                if p < PROB_FLOOR {
                    0.0
                } else {
                    rect2_dr_unchecked(&spec) / p
                }
            })
            .collect())
    }

    pub fn dr(&self, r: f64) -> Result<f64> {
        Ok(self.dr_terms(r)?.iter().sum())
    }
}

fn objective(gamma: &GammaVec, pair: (usize, usize), data: &PanelData) -> Result<PairwiseObjective> {
    let design = Design::new(data, gamma.dims().p)?;
    PairwiseObjective::new(&design, gamma, pair)
}

/// `Σ_t log P(Y_i = y_i, Y_j = y_j | past)` under correlation `R(i, j)`.
pub fn pairwise_ll(gamma: &GammaVec, corr: &CorrParam, pair: (usize, usize), data: &PanelData) -> Result<f64> {
    objective(gamma, pair, data)?.value(corr_entry(corr, pair)?)
}

/// Derivative of [`pairwise_ll`] in `R(i, j)`.
pub fn pairwise_ll_dr(gamma: &GammaVec, corr: &CorrParam, pair: (usize, usize), data: &PanelData) -> Result<f64> {
    objective(gamma, pair, data)?.dr(corr_entry(corr, pair)?)
}

/// Per-observation terms of [`pairwise_ll_dr`], path-major.
pub fn pairwise_dr_terms(
    gamma: &GammaVec,
    corr: &CorrParam,
    pair: (usize, usize),
    data: &PanelData,
) -> Result<Vec<f64>> {
    objective(gamma, pair, data)?.dr_terms(corr_entry(corr, pair)?)
}

fn corr_entry(corr: &CorrParam, (i, j): (usize, usize)) -> Result<f64> {
    if !(i < j && j < corr.k()) {
        return Err(invalid(format!("pair ({i}, {j}) needs i < j < k = {}", corr.k())));
    }
    Ok(corr.get(i, j))
}
