//! Marginal, pairwise and full pseudo conditional log-likelihoods for single
//! paths and panels, with their analytic derivatives.
//!
//! Every objective sums `t = p+1..T` inside each path; paths never borrow lags
//! from one another. Log-probabilities are floored at `log(1e-300)` and the
//! number of floored terms is reported alongside the value.

mod design;
mod full;
mod marginal;
mod pairwise;
mod params;

pub use design::Design;
pub use full::{full_pl, full_pl_with, FullObjective, FullPlMode, DEFAULT_GHK_DRAWS};
pub use marginal::{
    equation_ll, equation_ll_grad, marginal_pl, marginal_pl_eval, marginal_pl_grad, marginal_score_terms,
};
pub use pairwise::{pairwise_dr_terms, pairwise_ll, pairwise_ll_dr, PairwiseObjective};
pub use params::{pair_index, pairs, CorrParam, GammaVec};

use crate::gauss::{std_normal_cdf, std_normal_pdf};

/// Smallest probability passed to `ln`.
pub const PROB_FLOOR: f64 = 1e-300;

/// An objective value and the number of log terms that hit the floor.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LogLik {
    pub value: f64,
    pub clamped: usize,
}

impl LogLik {
    #[inline]
    pub(crate) fn add_prob(&mut self, p: f64) {
        if p < PROB_FLOOR {
            self.clamped += 1;
            self.value += PROB_FLOOR.ln();
        } else {
            self.value += p.ln();
        }
    }

    pub(crate) fn merge(mut self, other: LogLik) -> LogLik {
        self.value += other.value;
        self.clamped += other.clamped;
        self
    }
}

/// `P(Y = y)` for a univariate probit with predictor `s`.
#[inline]
pub(crate) fn probit_prob(s: f64, y: u8) -> f64 {
    if y == 1 {
        std_normal_cdf(s)
    } else {
        std_normal_cdf(-s)
    }
}

/// Derivative in `s` of `y log Φ(s) + (1-y) log Φ(-s)`; zero where the
/// probability is floored, matching the floored objective.
#[inline]
pub(crate) fn probit_score(s: f64, y: u8) -> f64 {
    let p = probit_prob(s, y);
    if p < PROB_FLOOR {
        return 0.0;
    }
    let ratio = std_normal_pdf(s) / p;
    if y == 1 {
        ratio
    } else {
        -ratio
    }
}
