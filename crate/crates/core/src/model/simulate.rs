use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{CovariateSource, LagState, ModelParams, PanelData, PathData};
use crate::error::{invalid, Result};
use crate::rng::{self, StreamRng};

/// Steps discarded before a simulated path is recorded.
pub const DEFAULT_BURN_IN: usize = 500;

/// Inputs of every recorded transition of a simulated path.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    /// Lag state before each recorded step.
    pub states: Vec<LagState>,
    /// Covariate `X_{t-1}` used by each recorded step.
    pub x_prev: Vec<Vec<f64>>,
    /// Noise `ε_t` of each recorded step.
    pub eps: Vec<Vec<f64>>,
}

pub(crate) fn draw_noise(chol: &[f64], k: usize, rng: &mut StreamRng, z: &mut [f64], out: &mut [f64]) {
    for v in z.iter_mut() {
        *v = rng.sample(StandardNormal);
    }
    for i in 0..k {
        out[i] = (0..=i).map(|l| chol[i * k + l] * z[l]).sum();
    }
}

fn run(
    params: &ModelParams,
    covariates: &dyn CovariateSource,
    t_len: usize,
    burn_in: usize,
    seed: u64,
    mut trace: Option<&mut SimTrace>,
) -> Result<PathData> {
    let dims = params.dims();
    if t_len == 0 {
        return Err(invalid("horizon T must be >= 1"));
    }
    if covariates.d() != dims.d {
        return Err(invalid(format!(
            "covariate source has dimension {}, model expects {}",
            covariates.d(),
            dims.d
        )));
    }
    let (k, d) = (dims.k, dims.d);
    let total = burn_in + t_len;
    let chol = params.noise_cholesky();
    // row 0 is the pre-sample covariate feeding the first step
    let xs = covariates.generate(total + 1, &mut rng::stream(seed, &[1]));
    let mut eps_rng = rng::stream(seed, &[2]);

    let mut state = LagState::zeros(dims.p, k);
    let mut lam = vec![0.0; k];
    let mut z = vec![0.0; k];
    let mut eps = vec![0.0; k];
    let mut y = Vec::with_capacity(t_len * k);
    let mut x = Vec::with_capacity(t_len * d);
    for t in 1..=total {
        let x_prev = &xs[(t - 1) * d..t * d];
        draw_noise(&chol, k, &mut eps_rng, &mut z, &mut eps);
        params.predictor_into(state.as_slice(), x_prev, &mut lam);
        let new: Vec<u8> = lam.iter().zip(&eps).map(|(l, e)| u8::from(l + e > 0.0)).collect();
        if t > burn_in {
            if let Some(tr) = trace.as_deref_mut() {
                tr.states.push(state.clone());
                tr.x_prev.push(x_prev.to_vec());
                tr.eps.push(eps.clone());
            }
            y.extend_from_slice(&new);
            x.extend_from_slice(&xs[t * d..(t + 1) * d]);
        }
        state.push(&new);
    }
    PathData::new(k, d, y, x)
}

/// Simulates `burn_in + T` steps from the all-zeros lag state and keeps the
/// last `T`. Deterministic given `seed`.
pub fn simulate_path(
    params: &ModelParams,
    covariates: &dyn CovariateSource,
    t_len: usize,
    burn_in: usize,
    seed: u64,
) -> Result<PathData> {
    run(params, covariates, t_len, burn_in, seed, None)
}

/// Like [`simulate_path`], also returning the inputs of every recorded step.
pub fn simulate_path_traced(
    params: &ModelParams,
    covariates: &dyn CovariateSource,
    t_len: usize,
    burn_in: usize,
    seed: u64,
) -> Result<(PathData, SimTrace)> {
    let mut trace = SimTrace {
        states: Vec::with_capacity(t_len),
        x_prev: Vec::with_capacity(t_len),
        eps: Vec::with_capacity(t_len),
    };
    let path = run(params, covariates, t_len, burn_in, seed, Some(&mut trace))?;
    Ok((path, trace))
}

/// Simulates `n` independent paths; path `j` uses its own stream derived
/// from `(seed, j)`.
pub fn simulate_panel(
    params: &ModelParams,
    covariates: &dyn CovariateSource,
    n: usize,
    t_len: usize,
    burn_in: usize,
    seed: u64,
) -> Result<PanelData> {
    if n == 0 {
        return Err(invalid("panel needs n >= 1"));
    }
    let paths = (0..n)
        .into_par_iter()
        .map(|j| simulate_path(params, covariates, t_len, burn_in, rng::derive_seed(seed, &[j as u64])))
        .collect::<Result<Vec<_>>>()?;
    PanelData::new(paths)
}
