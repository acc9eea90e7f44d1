use crate::error::{invalid, Result};
use crate::model::{Dims, PanelData};

use super::GammaVec;

/// Regressor rows `(1, Y_{t-1}, ..., Y_{t-p}, X_{t-1})` and responses `Y_t`
/// for every usable `(path, t)`, path-major and time-ordered.
#[derive(Debug, Clone)]
pub struct Design {
    dims: Dims,
    n_obs: usize,
    z: Vec<f64>,
    y: Vec<u8>,
}

impl Design {
    pub fn new(panel: &PanelData, p: usize) -> Result<Self> {
        let dims = Dims::new(p, panel.k(), panel.d())?;
        let t_len = panel.horizon();
        if t_len <= p {
            return Err(invalid(format!("horizon T = {t_len} must exceed the lag order p = {p}")));
        }
        let k = dims.k;
        let q = dims.regressors();
        let n_obs = panel.n() * (t_len - p);
        let mut z = Vec::with_capacity(n_obs * q);
        let mut y = Vec::with_capacity(n_obs * k);
        for path in panel.paths() {
            for t in p..t_len {
                z.push(1.0);
                for l in 1..=p {
                    z.extend(path.y(t - l).iter().map(|&v| v as f64));
                }
                z.extend_from_slice(path.x(t - 1));
                y.extend_from_slice(path.y(t));
            }
        }
        debug_assert_eq!(z.len(), n_obs * q);
        Ok(Self { dims, n_obs, z, y })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn n_obs(&self) -> usize {
        self.n_obs
    }

    pub fn regressors(&self, obs: usize) -> &[f64] {
        let q = self.dims.regressors();
        &self.z[obs * q..(obs + 1) * q]
    }

    #[inline]
    pub fn response(&self, obs: usize, i: usize) -> u8 {
        self.y[obs * self.dims.k + i]
    }

    pub fn responses(&self, obs: usize) -> &[u8] {
        let k = self.dims.k;
        &self.y[obs * k..(obs + 1) * k]
    }

    pub(crate) fn check_gamma(&self, gamma: &GammaVec) -> Result<()> {
        if gamma.dims() != self.dims {
            return Err(invalid(format!(
                "gamma dimensions {:?} do not match data {:?}",
                gamma.dims(),
                self.dims
            )));
        }
        Ok(())
    }

    /// `λ_i` at every observation for the equation coefficients `row`.
    pub fn equation_predictor(&self, row: &[f64]) -> Vec<f64> {
        let q = self.dims.regressors();
        debug_assert_eq!(row.len(), q);
        self.z
            .chunks_exact(q)
            .map(|z| z.iter().zip(row).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `λ_t` for every observation, row-major `n_obs x k`.
    pub fn predictors(&self, gamma: &[f64]) -> Vec<f64> {
        let k = self.dims.k;
        let q = self.dims.regressors();
        let mut out = vec![0.0; self.n_obs * k];
        for (obs, z) in self.z.chunks_exact(q).enumerate() {
            for i in 0..k {
                out[obs * k + i] = z.iter().enumerate().map(|(m, v)| gamma[m * k + i] * v).sum();
            }
        }
        out
    }
}
