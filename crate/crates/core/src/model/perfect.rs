//! Coupling from the past for the lag-state chain on `({0,1}^k)^p`.
//!
//! At time `t` the chain moves by the random map
//! `F_t(state) = (1(λ(state, X_{t-1}) + ε_t > 0), state[..p-1])`. The maps for
//! `t = -m+1, ..., 0` are composed forward; once the image of the whole state
//! space is a single point, that point is an exact draw from the stationary
//! law at time 0. The lookback `m` doubles (`p, 2p, 4p, ...`) and earlier draws
//! are reused.

use super::covariates::{ArmaStream, ScalarCovariate};
use super::simulate::draw_noise;
use super::{CovariateModel, LagState, ModelParams};
use crate::error::{invalid, Error, Result};
use crate::rng::{self, StreamRng};

/// Largest supported `k·p`.
pub const MAX_PERFECT_STATE_BITS: usize = 16;

/// Outcome of [`perfect_sample`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PerfectSample {
    Coalesced { state: LagState, lookback: usize },
    NotCoalesced { lookback: usize },
}

/// Lazily extended backward history of `(X_{t-1}, ε_t)` for
/// `t = 0, -1, -2, ...`.
///
/// ARMA columns are produced by a stationary stream read in reverse time,
/// which has the right joint law because stationary Gaussian ARMA processes
/// are time-reversible. ARMA columns are scaled by their stationary standard
/// deviation.
pub struct BackwardHistory {
    k: usize,
    d: usize,
    chol: Vec<f64>,
    columns: Vec<Column>,
    x_rng: StreamRng,
    eps_rng: StreamRng,
    /// `x[m]` is `X_{-m-1}`.
    x: Vec<f64>,
    /// `eps[m]` is `ε_{-m}`.
    eps: Vec<f64>,
}

enum Column {
    Arma(ArmaStream),
    Constant(f64),
}

impl BackwardHistory {
    pub fn new(params: &ModelParams, covariates: &CovariateModel, seed: u64) -> Result<Self> {
        let dims = params.dims();
        if covariates.columns.len() != dims.d {
            return Err(invalid(format!(
                "covariate model has dimension {}, model expects {}",
                covariates.columns.len(),
                dims.d
            )));
        }
        let mut x_rng = rng::stream(seed, &[1]);
        let columns = covariates
            .columns
            .iter()
            .map(|c| match c {
                ScalarCovariate::Arma(p) => {
                    Column::Arma(ArmaStream::new(p.clone(), super::Standardize::Population, &mut x_rng))
                }
                ScalarCovariate::Constant(v) => Column::Constant(*v),
            })
            .collect();
        Ok(Self {
            k: dims.k,
            d: dims.d,
            chol: params.noise_cholesky(),
            columns,
            x_rng,
            eps_rng: rng::stream(seed, &[2]),
            x: Vec::new(),
            eps: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.eps.len() / self.k
    }

    pub fn is_empty(&self) -> bool {
        self.eps.is_empty()
    }

    fn extend_to(&mut self, m: usize) {
        let (k, d) = (self.k, self.d);
        let mut z = vec![0.0; k];
        let mut e = vec![0.0; k];
        while self.len() < m {
            draw_noise(&self.chol, k, &mut self.eps_rng, &mut z, &mut e);
            self.eps.extend_from_slice(&e);
            for col in &mut self.columns {
                let v = match col {
                    Column::Arma(s) => s.next_value(&mut self.x_rng),
                    Column::Constant(v) => *v,
                };
                self.x.push(v);
            }
        }
        debug_assert_eq!(self.x.len(), self.len() * d);
    }

    /// `(X_{-m-1}, ε_{-m})`.
    pub fn at(&self, m: usize) -> (&[f64], &[f64]) {
        (&self.x[m * self.d..(m + 1) * self.d], &self.eps[m * self.k..(m + 1) * self.k])
    }
}

/// Draws the lag state at time 0 from the stationary law by coupling from
/// the past, or reports that `max_lookback` steps were not enough.
pub fn perfect_sample(
    params: &ModelParams,
    covariates: &CovariateModel,
    max_lookback: usize,
    seed: u64,
) -> Result<PerfectSample> {
    let dims = params.dims();
    let bits = dims.k * dims.p;
    if bits > MAX_PERFECT_STATE_BITS {
        return Err(Error::Unsupported(format!(
            "perfect sampling enumerates 2^(k·p) states; k·p = {bits} exceeds {MAX_PERFECT_STATE_BITS}"
        )));
    }
    if max_lookback < dims.p {
        return Err(invalid(format!("max_lookback {max_lookback} is below p = {}", dims.p)));
    }
    let mut history = BackwardHistory::new(params, covariates, seed)?;
    let n_states = 1usize << bits;
    let k = dims.k;

    // Σ_l A_l y_{t-l} for every state code.
    let lag_effect: Vec<f64> = (0..n_states)
        .flat_map(|code| {
            let state = LagState::decode(code as u32, dims.p, k);
            let mut out = vec![0.0; k];
            params.predictor_into(state.as_slice(), &vec![0.0; dims.d], &mut out);
            for (o, c) in out.iter_mut().zip(params.c().iter()) {
                *o -= c;
            }
            out
        })
        .collect();
    let mask = (n_states - 1) as u32;

    let mut m = dims.p;
    loop {
        history.extend_to(m);
        let mut image: Vec<u32> = (0..n_states as u32).collect();
        let mut seen = vec![false; n_states];
        let mut shift = vec![0.0; k];
        for idx in (0..m).rev() {
            let (x, eps) = history.at(idx);
            for i in 0..k {
                let bx: f64 = x.iter().enumerate().map(|(j, v)| params.b()[(i, j)] * v).sum();
                shift[i] = params.c()[i] + bx + eps[i];
            }
            let mut next = Vec::with_capacity(image.len());
            for &code in &image {
                let effect = &lag_effect[code as usize * k..(code as usize + 1) * k];
                let y = (0..k).fold(0u32, |acc, i| acc | (u32::from(effect[i] + shift[i] > 0.0) << i));
                let new = ((code << k) & mask) | y;
                if !seen[new as usize] {
                    seen[new as usize] = true;
                    next.push(new);
                }
            }
            for &c in &next {
                seen[c as usize] = false;
            }
            image = next;
        }
        if image.len() == 1 {
            return Ok(PerfectSample::Coalesced {
                state: LagState::decode(image[0], dims.p, k),
                lookback: m,
            });
        }
        if m >= max_lookback {
            return Ok(PerfectSample::NotCoalesced { lookback: m });
        }
        m = (2 * m).min(max_lookback);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn params(a: f64, c: &[f64]) -> ModelParams {
        let k = c.len();
        ModelParams::new(
            vec![DMatrix::from_element(k, k, a)],
            DMatrix::zeros(k, 0),
            DVector::from_row_slice(c),
            DMatrix::identity(k, k),
        )
        .unwrap()
    }

    #[test]
    fn state_independent_map_coalesces_immediately() {
        for seed in 0..50 {
            match perfect_sample(&params(0.0, &[0.0]), &CovariateModel::none(), 64, seed).unwrap() {
                PerfectSample::Coalesced { lookback, .. } => assert_eq!(lookback, 1),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn huge_intercepts_force_all_ones() {
        let p = ModelParams::new(
            vec![DMatrix::zeros(2, 2), DMatrix::zeros(2, 2)],
            DMatrix::zeros(2, 0),
            DVector::from_vec(vec![10.0, 10.0]),
            DMatrix::identity(2, 2),
        )
        .unwrap();
        let out = perfect_sample(&p, &CovariateModel::none(), 64, 3).unwrap();
        assert_eq!(
            out,
            PerfectSample::Coalesced {
                state: LagState::from_lags(&[vec![1, 1], vec![1, 1]]).unwrap(),
                lookback: 2
            }
        );
    }

    #[test]
    fn too_many_states_unsupported() {
        let p = params(0.0, &[0.0; 17]);
        assert!(matches!(
            perfect_sample(&p, &CovariateModel::none(), 64, 1),
            Err(Error::Unsupported(_))
        ));
        assert!(perfect_sample(&params(0.0, &[0.0]), &CovariateModel::none(), 0, 1).is_err());
    }

    #[test]
    fn lookback_budget_can_run_out() {
        // strong positive feedback makes coalescence slow
        let p = params(6.0, &[-3.0]);
        let out = perfect_sample(&p, &CovariateModel::none(), 2, 1).unwrap();
        assert!(matches!(out, PerfectSample::NotCoalesced { lookback: 2 }));
    }

    #[test]
    fn history_reuses_draws() {
        let p = params(0.3, &[0.1, 0.2]);
        let mut h = BackwardHistory::new(&p, &CovariateModel::none(), 5).unwrap();
        h.extend_to(3);
        let first = h.at(2).1.to_vec();
        h.extend_to(10);
        assert_eq!(h.at(2).1, first.as_slice());
        assert_eq!(h.len(), 10);
    }
}
