use nalgebra::DMatrix;
use rand::Rng;

use super::{std_normal_cdf, std_normal_inv};
use crate::error::{invalid, Result};
use crate::linalg::lower_cholesky;
use crate::rng;

/// A k-dimensional orthant-type rectangle `P(Y = s)` with
/// `Y_i = 1(lam_i + eps_i > 0)` and `eps ~ N(0, r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RectKSpec {
    pub lam: Vec<f64>,
    pub r: DMatrix<f64>,
    pub s: Vec<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhkEstimate {
    pub prob: f64,
    pub std_error: f64,
}

/// GHK sampler with a fixed block of uniforms, so repeated evaluations share
/// common random numbers and are deterministic functions of their inputs.
#[derive(Debug, Clone)]
pub struct GhkSampler {
    k: usize,
    n_draws: usize,
    uniforms: Vec<f64>,
}

impl GhkSampler {
    pub fn new(k: usize, n_draws: usize, seed: u64) -> Result<Self> {
        if k == 0 {
            return Err(invalid("GHK needs k >= 1"));
        }
        if n_draws < 100 {
            return Err(invalid(format!("GHK needs at least 100 draws, got {n_draws}")));
        }
        let width = k - 1;
        let mut rng = rng::stream(seed, &[0x0067_484b]);
        let uniforms = (0..n_draws * width)
            .map(|_| rng.random::<f64>())
            .collect();
        Ok(Self {
            k,
            n_draws,
            uniforms,
        })
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn n_draws(&self) -> usize {
        self.n_draws
    }

    /// Estimates `P(Y = s)` given the row-major lower Cholesky factor `chol`
    /// of the noise correlation matrix.
    pub fn estimate(&self, lam: &[f64], chol: &[f64], s: &[u8]) -> GhkEstimate {
        let k = self.k;
        debug_assert_eq!(lam.len(), k);
        debug_assert_eq!(chol.len(), k * k);
        if k == 1 {
            let prob = orthant_prob(-lam[0] / chol[0], s[0]);
            return GhkEstimate {
                prob,
                std_error: 0.0,
            };
        }
        let width = k - 1;
        let mut z = vec![0.0; k];
        // Welford: weights are often nearly equal, so E[w²] - E[w]² cancels
        let (mut mean_w, mut m2) = (0.0, 0.0);
        for draw in 0..self.n_draws {
            let u = &self.uniforms[draw * width..(draw + 1) * width];
            let mut weight = 1.0;
            for i in 0..k {
                let row = &chol[i * k..i * k + i];
                let mean: f64 = row.iter().zip(&z[..i]).map(|(l, z)| l * z).sum();
                let cut = (-lam[i] - mean) / chol[i * k + i];
                let p = orthant_prob(cut, s[i]);
                weight *= p;
                if weight <= 0.0 {
                    break;
                }
                if i < width {
                    let v = (u[i] * p).max(f64::MIN_POSITIVE);
                    // truncated draw by inverse CDF, always from the lower tail
                    // of the side being sampled
                    z[i] = if s[i] == 0 {
                        std_normal_inv(v)
                    } else {
                        -std_normal_inv(v)
                    };
                }
            }
            let delta = weight - mean_w;
            mean_w += delta / (draw + 1) as f64;
            m2 += delta * (weight - mean_w);
        }
        let n = self.n_draws as f64;
        let var = if self.n_draws > 1 { m2 / (n - 1.0) } else { 0.0 };
        GhkEstimate {
            prob: mean_w,
            std_error: (var / n).sqrt(),
        }
    }
}

/// `P(z <= cut)` for `s = 0`, `P(z > cut)` for `s = 1`.
#[inline]
fn orthant_prob(cut: f64, s: u8) -> f64 {
    if s == 0 {
        std_normal_cdf(cut)
    } else {
        std_normal_cdf(-cut)
    }
}

/// GHK estimate of a k-dimensional rectangle probability with its
/// Monte-Carlo standard error. Exact when `k = 1`.
pub fn rect_k_ghk(spec: &RectKSpec, n_draws: usize, seed: u64) -> Result<GhkEstimate> {
    let k = spec.lam.len();
    if k == 0 || spec.s.len() != k || spec.r.nrows() != k || spec.r.ncols() != k {
        return Err(invalid("rectangle dimensions do not match"));
    }
    if spec.s.iter().any(|&s| s > 1) {
        return Err(invalid("outcomes must be 0 or 1"));
    }
    let chol = lower_cholesky(&spec.r)
        .ok_or_else(|| invalid("correlation matrix is not positive definite"))?;
    let sampler = GhkSampler::new(k, n_draws, seed)?;
    Ok(sampler.estimate(&spec.lam, &chol, &spec.s))
}
