//! Covariate generators: stationary ARMA processes, constant (path-level)
//! columns, and resampling of observed covariate paths.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::rng::{self, StreamRng};

/// Draws discarded before an ARMA stretch is used.
const ARMA_WARMUP: usize = 500;

/// A source of covariate rows (`len x d`, row-major).
pub trait CovariateSource: Sync {
    fn d(&self) -> usize;

    /// Generates `len` consecutive covariate rows.
    fn generate(&self, len: usize, rng: &mut StreamRng) -> Vec<f64>;
}

/// How a generated ARMA stretch is centered and scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Standardize {
    /// Sample mean and sample standard deviation of the generated stretch.
    #[default]
    Sample,
    /// Population mean (zero) and the stationary standard deviation.
    Population,
}

/// Stationary ARMA(p, q) process
/// `X_t = Σ ar_i X_{t-i} + e_t + Σ ma_j e_{t-j}`, `e_t ~ N(0, sd²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmaProcess {
    ar: Vec<f64>,
    ma: Vec<f64>,
    innovation_sd: f64,
}

/// Validated ARMA covariate process.
pub fn arma_covariates(ar: &[f64], ma: &[f64], innovation_sd: f64) -> Result<ArmaProcess> {
    ArmaProcess::new(ar.to_vec(), ma.to_vec(), innovation_sd)
}

/// Stationarity of `1 - Σ ar_i z^i` via the Schur–Cohn step-down recursion:
/// all roots lie outside the unit circle iff every reflection coefficient
/// has modulus below one.
pub(crate) fn is_stationary(ar: &[f64]) -> bool {
    let mut coef = ar.to_vec();
    while let Some(&kappa) = coef.last() {
        if !(kappa.abs() < 1.0) {
            return false;
        }
        let m = coef.len();
        let denom = 1.0 - kappa * kappa;
        coef = (0..m - 1)
            .map(|i| (coef[i] + kappa * coef[m - 2 - i]) / denom)
            .collect();
    }
    true
}

impl ArmaProcess {
    pub fn new(ar: Vec<f64>, ma: Vec<f64>, innovation_sd: f64) -> Result<Self> {
        if ar.iter().chain(&ma).any(|v| !v.is_finite()) {
            return Err(invalid("non-finite ARMA coefficient"));
        }
        if !(innovation_sd > 0.0 && innovation_sd.is_finite()) {
            return Err(invalid(format!("innovation sd must be positive, got {innovation_sd}")));
        }
        if !is_stationary(&ar) {
            return Err(invalid(format!("AR coefficients {ar:?} are not stationary")));
        }
        Ok(Self {
            ar,
            ma,
            innovation_sd,
        })
    }

    pub fn ar(&self) -> &[f64] {
        &self.ar
    }

    pub fn ma(&self) -> &[f64] {
        &self.ma
    }

    pub fn innovation_sd(&self) -> f64 {
        self.innovation_sd
    }

    /// Stationary standard deviation from the MA(∞) weights.
    pub fn stationary_sd(&self) -> f64 {
        let mut psi: Vec<f64> = vec![1.0];
        let mut total = 1.0;
        for j in 1..100_000 {
            let mut v = self.ma.get(j - 1).copied().unwrap_or(0.0);
            for (i, a) in self.ar.iter().enumerate() {
                if j > i {
                    v += a * psi[j - 1 - i];
                }
            }
            psi.push(v);
            total += v * v;
            if j > self.ar.len() + self.ma.len() + 10 && v.abs() < 1e-17 {
                break;
            }
        }
        self.innovation_sd * total.sqrt()
    }

    /// Raw (unstandardized) stretch of length `len` after warm-up.
    pub fn sample_raw(&self, len: usize, rng: &mut StreamRng) -> Vec<f64> {
        let mut stream = ArmaStream::new(self.clone(), Standardize::Sample, rng);
        (0..len).map(|_| stream.next_raw(rng)).collect()
    }

    /// Standardized stretch of length `len`.
    pub fn sample(&self, len: usize, standardize: Standardize, rng: &mut StreamRng) -> Vec<f64> {
        let raw = self.sample_raw(len, rng);
        match standardize {
            Standardize::Sample => standardize_sample(raw),
            Standardize::Population => {
                let sd = self.stationary_sd();
                raw.into_iter().map(|v| v / sd).collect()
            }
        }
    }

    /// Standardized stretch drawn from the stream `seed`.
    pub fn generate(&self, len: usize, seed: u64) -> Vec<f64> {
        self.sample(len, Standardize::Sample, &mut rng::stream(seed, &[]))
    }
}

fn standardize_sample(mut v: Vec<f64>) -> Vec<f64> {
    let n = v.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let mean = v.iter().sum::<f64>() / n as f64;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    let sd = var.sqrt();
    for x in &mut v {
        *x = if sd > 0.0 { (*x - mean) / sd } else { 0.0 };
    }
    v
}

/// Stateful ARMA generator that can be extended one value at a time.
///
/// A stationary Gaussian ARMA process is time-reversible, so the values of
/// this stream can be read as `X_0, X_{-1}, X_{-2}, ...` when a history has
/// to be extended backwards in time.
#[derive(Debug, Clone)]
pub struct ArmaStream {
    process: ArmaProcess,
    scale: f64,
    past_x: Vec<f64>,
    past_e: Vec<f64>,
}

impl ArmaStream {
    pub fn new(process: ArmaProcess, standardize: Standardize, rng: &mut StreamRng) -> Self {
        let scale = match standardize {
            Standardize::Population => process.stationary_sd(),
            Standardize::Sample => 1.0,
        };
        let mut stream = Self {
            past_x: vec![0.0; process.ar.len()],
            past_e: vec![0.0; process.ma.len()],
            process,
            scale,
        };
        for _ in 0..ARMA_WARMUP {
            stream.next_raw(rng);
        }
        stream
    }

    fn next_raw(&mut self, rng: &mut StreamRng) -> f64 {
        let e = self.process.innovation_sd * rng.sample::<f64, _>(StandardNormal);
        let mut x = e;
        for (a, px) in self.process.ar.iter().zip(&self.past_x) {
            x += a * px;
        }
        for (m, pe) in self.process.ma.iter().zip(&self.past_e) {
            x += m * pe;
        }
        if !self.past_x.is_empty() {
            self.past_x.rotate_right(1);
            self.past_x[0] = x;
        }
        if !self.past_e.is_empty() {
            self.past_e.rotate_right(1);
            self.past_e[0] = e;
        }
        x
    }

    /// Next value divided by the stream's scale.
    pub fn next_value(&mut self, rng: &mut StreamRng) -> f64 {
        self.next_raw(rng) / self.scale
    }
}

/// One covariate column.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarCovariate {
    Arma(ArmaProcess),
    /// A value fixed for the whole path, e.g. a site-level effect.
    Constant(f64),
}

/// Independent covariate columns stacked into a `d`-vector.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CovariateModel {
    pub columns: Vec<ScalarCovariate>,
    pub standardize: Standardize,
}

impl CovariateModel {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new(columns: Vec<ScalarCovariate>) -> Self {
        Self {
            columns,
            standardize: Standardize::Sample,
        }
    }

    pub fn with_standardize(mut self, standardize: Standardize) -> Self {
        self.standardize = standardize;
        self
    }
}

impl CovariateSource for CovariateModel {
    fn d(&self) -> usize {
        self.columns.len()
    }

    fn generate(&self, len: usize, rng: &mut StreamRng) -> Vec<f64> {
        let d = self.columns.len();
        let mut out = vec![0.0; len * d];
        for (m, col) in self.columns.iter().enumerate() {
            let values = match col {
                ScalarCovariate::Arma(p) => p.sample(len, self.standardize, rng),
                ScalarCovariate::Constant(v) => vec![*v; len],
            };
            for (t, v) in values.into_iter().enumerate() {
                out[t * d + m] = v;
            }
        }
        out
    }
}

/// Resamples whole observed covariate paths.
///
/// A requested stretch longer than the observed horizon is filled at the
/// front with rows drawn at random from the chosen path, so the final `T`
/// rows are always an observed path in its original order.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedCovariates {
    d: usize,
    paths: Vec<Vec<f64>>,
}

impl ObservedCovariates {
    pub fn new(d: usize, paths: Vec<Vec<f64>>) -> Result<Self> {
        if paths.is_empty() {
            return Err(invalid("no observed covariate paths"));
        }
        if d == 0 {
            return Ok(Self { d, paths });
        }
        let len = paths[0].len();
        if len == 0 || !len.is_multiple_of(d) || paths.iter().any(|p| p.len() != len) {
            return Err(invalid("observed covariate paths must share a non-empty length"));
        }
        Ok(Self { d, paths })
    }
}

impl CovariateSource for ObservedCovariates {
    fn d(&self) -> usize {
        self.d
    }

    fn generate(&self, len: usize, rng: &mut StreamRng) -> Vec<f64> {
        let d = self.d;
        if d == 0 {
            return Vec::new();
        }
        let path = &self.paths[rng.random_range(0..self.paths.len())];
        let rows = path.len() / d;
        let mut out = Vec::with_capacity(len * d);
        let fill = len.saturating_sub(rows);
        for _ in 0..fill {
            let t = rng.random_range(0..rows);
            out.extend_from_slice(&path[t * d..(t + 1) * d]);
        }
        let keep = len - fill;
        out.extend_from_slice(&path[(rows - keep) * d..]);
        out
    }
}
