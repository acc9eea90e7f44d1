//! Model parameters, observed data containers, the linear predictor and the
//! one-step transition of the autoregressive probit model
//! `Y_t = 1(λ_t + ε_t > 0)`, `λ_t = C + Σ_l A_l Y_{t-l} + B X_{t-1}`,
//! `ε_t ~ N(0, R)`.

mod covariates;
mod perfect;
mod simulate;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{check_correlation, lower_cholesky};

pub use covariates::{
    arma_covariates, ArmaProcess, ArmaStream, CovariateModel, CovariateSource, ObservedCovariates,
    ScalarCovariate, Standardize,
};
pub use perfect::{perfect_sample, BackwardHistory, PerfectSample, MAX_PERFECT_STATE_BITS};
pub use simulate::{simulate_panel, simulate_path, simulate_path_traced, SimTrace, DEFAULT_BURN_IN};

/// Lag order, response dimension and covariate dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub p: usize,
    pub k: usize,
    pub d: usize,
}

impl Dims {
    pub fn new(p: usize, k: usize, d: usize) -> Result<Self> {
        if p == 0 || k == 0 {
            return Err(invalid(format!("need p >= 1 and k >= 1, got p={p}, k={k}")));
        }
        Ok(Self { p, k, d })
    }

    /// Number of regressors per equation: intercept, `p·k` lags, `d` covariates.
    pub fn regressors(&self) -> usize {
        1 + self.p * self.k + self.d
    }

    /// Length of the flattened regression parameter.
    pub fn gamma_len(&self) -> usize {
        self.k * self.regressors()
    }

    /// Number of free correlations, `k(k-1)/2`.
    pub fn corr_len(&self) -> usize {
        self.k * (self.k - 1) / 2
    }
}

/// Full parameter set `(A_1..A_p, B, C, R)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsRepr", into = "ParamsRepr")]
pub struct ModelParams {
    a: Vec<DMatrix<f64>>,
    b: DMatrix<f64>,
    c: DVector<f64>,
    r: DMatrix<f64>,
}

impl ModelParams {
    pub fn new(a: Vec<DMatrix<f64>>, b: DMatrix<f64>, c: DVector<f64>, r: DMatrix<f64>) -> Result<Self> {
        let k = c.len();
        if a.is_empty() || k == 0 {
            return Err(invalid("need at least one lag matrix and k >= 1"));
        }
        for (l, m) in a.iter().enumerate() {
            if m.nrows() != k || m.ncols() != k {
                return Err(invalid(format!("A_{} must be {k}x{k}", l + 1)));
            }
        }
        if b.nrows() != k {
            return Err(invalid(format!("B must have {k} rows, has {}", b.nrows())));
        }
        if r.nrows() != k || r.ncols() != k {
            return Err(invalid(format!("R must be {k}x{k}")));
        }
        let finite = a.iter().flat_map(|m| m.iter()).chain(b.iter()).chain(c.iter());
        if finite.into_iter().any(|v| !v.is_finite()) {
            return Err(invalid("non-finite entry in A, B or C"));
        }
        check_correlation(&r).map_err(Error::InvalidArgument)?;
        Ok(Self { a, b, c, r })
    }

    /// All coefficients zero and `R = I`: independent fair coins.
    pub fn null(dims: Dims) -> Self {
        Self {
            a: vec![DMatrix::zeros(dims.k, dims.k); dims.p],
            b: DMatrix::zeros(dims.k, dims.d),
            c: DVector::zeros(dims.k),
            r: DMatrix::identity(dims.k, dims.k),
        }
    }

    pub fn dims(&self) -> Dims {
        Dims {
            p: self.a.len(),
            k: self.c.len(),
            d: self.b.ncols(),
        }
    }

    pub fn a(&self) -> &[DMatrix<f64>] {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    pub fn r(&self) -> &DMatrix<f64> {
        &self.r
    }

    /// Row-major lower Cholesky factor of `R`.
    pub fn noise_cholesky(&self) -> Vec<f64> {
        lower_cholesky(&self.r).expect("R validated as positive definite")
    }

    /// Regression coefficients as a row-major `k x (1 + p·k + d)` table
    /// `[C | A_1 | ... | A_p | B]`.
    pub(crate) fn coefficient_rows(&self) -> Vec<f64> {
        let dims = self.dims();
        let q = dims.regressors();
        let mut out = vec![0.0; dims.k * q];
        for i in 0..dims.k {
            let row = &mut out[i * q..(i + 1) * q];
            row[0] = self.c[i];
            for (l, a) in self.a.iter().enumerate() {
                for j in 0..dims.k {
                    row[1 + l * dims.k + j] = a[(i, j)];
                }
            }
            for m in 0..dims.d {
                row[1 + dims.p * dims.k + m] = self.b[(i, m)];
            }
        }
        out
    }

    fn check_inputs(&self, state: &LagState, x_prev: &[f64]) -> Result<()> {
        let dims = self.dims();
        if state.k != dims.k || state.p != dims.p {
            return Err(invalid(format!(
                "lag state is (p={}, k={}), model is (p={}, k={})",
                state.p, state.k, dims.p, dims.k
            )));
        }
        if x_prev.len() != dims.d {
            return Err(invalid(format!("covariate has length {}, expected {}", x_prev.len(), dims.d)));
        }
        Ok(())
    }

    pub(crate) fn predictor_into(&self, state: &[u8], x_prev: &[f64], out: &mut [f64]) {
        let k = self.c.len();
        for i in 0..k {
            let mut v = self.c[i];
            for (l, a) in self.a.iter().enumerate() {
                let lag = &state[l * k..(l + 1) * k];
                for j in 0..k {
                    if lag[j] == 1 {
                        v += a[(i, j)];
                    }
                }
            }
            for (m, x) in x_prev.iter().enumerate() {
                v += self.b[(i, m)] * x;
            }
            out[i] = v;
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ParamsRepr {
    p: usize,
    k: usize,
    d: usize,
    /// `A[l][i][j]` is entry `(i, j)` of `A_{l+1}`.
    #[serde(rename = "A")]
    a: Vec<Vec<Vec<f64>>>,
    #[serde(rename = "B")]
    b: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    c: Vec<f64>,
    #[serde(rename = "R")]
    r: Vec<Vec<f64>>,
}

fn rows_to_matrix(rows: &[Vec<f64>], nrows: usize, ncols: usize, name: &str) -> Result<DMatrix<f64>> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(invalid(format!("{name} must be {nrows}x{ncols}")));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

impl TryFrom<ParamsRepr> for ModelParams {
    type Error = Error;

    fn try_from(v: ParamsRepr) -> Result<Self> {
        let dims = Dims::new(v.p, v.k, v.d)?;
        if v.a.len() != dims.p {
            return Err(invalid(format!("expected {} lag matrices, got {}", dims.p, v.a.len())));
        }
        let a = v
            .a
            .iter()
            .map(|m| rows_to_matrix(m, dims.k, dims.k, "A_l"))
            .collect::<Result<Vec<_>>>()?;
        let b = if dims.d == 0 && v.b.is_empty() {
            DMatrix::zeros(dims.k, 0)
        } else {
            rows_to_matrix(&v.b, dims.k, dims.d, "B")?
        };
        if v.c.len() != dims.k {
            return Err(invalid(format!("C must have length {}", dims.k)));
        }
        let r = rows_to_matrix(&v.r, dims.k, dims.k, "R")?;
        ModelParams::new(a, b, DVector::from_vec(v.c), r)
    }
}

impl From<ModelParams> for ParamsRepr {
    fn from(m: ModelParams) -> Self {
        let dims = m.dims();
        Self {
            p: dims.p,
            k: dims.k,
            d: dims.d,
            a: m.a.iter().map(matrix_to_rows).collect(),
            b: matrix_to_rows(&m.b),
            c: m.c.iter().copied().collect(),
            r: matrix_to_rows(&m.r),
        }
    }
}

/// The last `p` response vectors, newest first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LagState {
    p: usize,
    k: usize,
    bits: Vec<u8>,
}

impl LagState {
    pub fn zeros(p: usize, k: usize) -> Self {
        Self {
            p,
            k,
            bits: vec![0; p * k],
        }
    }

    /// Builds a state from `lags[0] = Y_{t-1}, ..., lags[p-1] = Y_{t-p}`.
    pub fn from_lags(lags: &[Vec<u8>]) -> Result<Self> {
        let p = lags.len();
        let k = lags.first().map_or(0, Vec::len);
        if p == 0 || k == 0 || lags.iter().any(|l| l.len() != k) {
            return Err(invalid("lag state needs p >= 1 vectors of a common length k >= 1"));
        }
        let bits: Vec<u8> = lags.concat();
        if bits.iter().any(|&b| b > 1) {
            return Err(invalid("lag state entries must be 0 or 1"));
        }
        Ok(Self { p, k, bits })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `Y_{t-lag}` for `lag` in `1..=p`.
    pub fn lag(&self, lag: usize) -> &[u8] {
        &self.bits[(lag - 1) * self.k..lag * self.k]
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    /// Pushes a new response vector, dropping the oldest.
    pub fn push(&mut self, y: &[u8]) {
        let k = self.k;
        self.bits.copy_within(0..(self.p - 1) * k, k);
        self.bits[..k].copy_from_slice(y);
    }

    /// Integer code with bit `l·k + i` holding coordinate `i` of lag `l + 1`.
    pub fn encode(&self) -> u32 {
        self.bits
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, &b)| acc | ((b as u32) << i))
    }

    pub fn decode(code: u32, p: usize, k: usize) -> Self {
        let bits = (0..p * k).map(|i| ((code >> i) & 1) as u8).collect();
        Self { p, k, bits }
    }
}

/// `λ = C + Σ_l A_l · state[l] + B · x_prev`.
pub fn linear_predictor(params: &ModelParams, state: &LagState, x_prev: &[f64]) -> Result<Vec<f64>> {
    params.check_inputs(state, x_prev)?;
    let mut out = vec![0.0; params.dims().k];
    params.predictor_into(state.as_slice(), x_prev, &mut out);
    Ok(out)
}

/// One transition: `y_i = 1` iff `λ_i + eps_i > 0`; the boundary maps to 0.
pub fn step(params: &ModelParams, state: &LagState, x_prev: &[f64], eps: &[f64]) -> Result<Vec<u8>> {
    if eps.len() != params.dims().k {
        return Err(invalid(format!("noise has length {}, expected {}", eps.len(), params.dims().k)));
    }
    if eps.iter().any(|e| !e.is_finite()) {
        return Err(invalid("non-finite noise"));
    }
    let lam = linear_predictor(params, state, x_prev)?;
    Ok(threshold(&lam, eps))
}

pub(crate) fn threshold(lam: &[f64], eps: &[f64]) -> Vec<u8> {
    lam.iter().zip(eps).map(|(l, e)| u8::from(l + e > 0.0)).collect()
}

/// One observed or simulated trajectory: responses `Y_t ∈ {0,1}^k` and
/// covariates `X_t ∈ R^d` for `t = 1..T`, stored row-major.
///
/// `X_t` is the covariate known at time `t`; it enters the predictor for
/// `Y_{t+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathData {
    k: usize,
    d: usize,
    y: Vec<u8>,
    x: Vec<f64>,
}

impl PathData {
    pub fn new(k: usize, d: usize, y: Vec<u8>, x: Vec<f64>) -> Result<Self> {
        if k == 0 {
            return Err(invalid("k must be >= 1"));
        }
        if !y.len().is_multiple_of(k) {
            return Err(invalid("response buffer is not a multiple of k"));
        }
        let t = y.len() / k;
        if x.len() != t * d {
            return Err(invalid(format!("covariate buffer has {} values, expected {}", x.len(), t * d)));
        }
        if y.iter().any(|&v| v > 1) {
            return Err(invalid("responses must be 0 or 1"));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(invalid("non-finite covariate"));
        }
        Ok(Self { k, d, y, x })
    }

    /// Builds a path from per-time rows.
    pub fn from_rows(y: &[Vec<u8>], x: &[Vec<f64>]) -> Result<Self> {
        let k = y.first().map_or(0, Vec::len);
        let d = x.first().map_or(0, Vec::len);
        if x.len() != y.len() && !(d == 0 && x.is_empty()) {
            return Err(invalid("response and covariate sequences differ in length"));
        }
        if y.iter().any(|r| r.len() != k) || x.iter().any(|r| r.len() != d) {
            return Err(invalid("ragged rows"));
        }
        Self::new(k, d, y.concat(), x.concat())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.y.len() / self.k
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// `Y_t` for zero-based `t`.
    pub fn y(&self, t: usize) -> &[u8] {
        &self.y[t * self.k..(t + 1) * self.k]
    }

    /// `X_t` for zero-based `t`.
    pub fn x(&self, t: usize) -> &[f64] {
        &self.x[t * self.d..(t + 1) * self.d]
    }

    pub fn y_flat(&self) -> &[u8] {
        &self.y
    }

    pub fn x_flat(&self) -> &[f64] {
        &self.x
    }
}

/// `n` independent paths sharing `(T, k, d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelData {
    paths: Vec<PathData>,
    response_names: Vec<String>,
    covariate_names: Vec<String>,
}

impl PanelData {
    pub fn new(paths: Vec<PathData>) -> Result<Self> {
        let first = paths.first().ok_or_else(|| invalid("panel needs at least one path"))?;
        let (k, d) = (first.k, first.d);
        Self::with_names(
            paths,
            (1..=k).map(|i| format!("Y{i}")).collect(),
            (1..=d).map(|m| format!("X{m}")).collect(),
        )
    }

    pub fn with_names(paths: Vec<PathData>, response_names: Vec<String>, covariate_names: Vec<String>) -> Result<Self> {
        let first = paths.first().ok_or_else(|| invalid("panel needs at least one path"))?;
        let (k, d, t) = (first.k, first.d, first.len());
        if paths.iter().any(|p| p.k != k || p.d != d || p.len() != t) {
            return Err(invalid("all paths must share k, d and T"));
        }
        if response_names.len() != k || covariate_names.len() != d {
            return Err(invalid("series names do not match the panel dimensions"));
        }
        Ok(Self {
            paths,
            response_names,
            covariate_names,
        })
    }

    pub fn n(&self) -> usize {
        self.paths.len()
    }

    pub fn k(&self) -> usize {
        self.paths[0].k
    }

    pub fn d(&self) -> usize {
        self.paths[0].d
    }

    /// Common horizon `T`.
    pub fn horizon(&self) -> usize {
        self.paths[0].len()
    }

    pub fn paths(&self) -> &[PathData] {
        &self.paths
    }

    pub fn path(&self, j: usize) -> &PathData {
        &self.paths[j]
    }

    pub fn response_names(&self) -> &[String] {
        &self.response_names
    }

    pub fn covariate_names(&self) -> &[String] {
        &self.covariate_names
    }

    pub fn into_paths(self) -> Vec<PathData> {
        self.paths
    }
}

impl From<PathData> for PanelData {
    fn from(path: PathData) -> Self {
        PanelData::new(vec![path]).expect("a single path is a valid panel")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn sec5() -> ModelParams {
        presets::paper_sec5().params
    }

    #[test]
    fn predictor_reduces_to_intercept() {
        let lam = linear_predictor(&sec5(), &LagState::zeros(1, 2), &[0.0]).unwrap();
        assert_eq!(lam, vec![0.2, 0.4]);
    }

    #[test]
    fn predictor_zero_parameters() {
        let p = ModelParams::new(
            vec![DMatrix::zeros(2, 2)],
            DMatrix::zeros(2, 1),
            DVector::zeros(2),
            DMatrix::identity(2, 2),
        )
        .unwrap();
        let state = LagState::from_lags(&[vec![1, 0]]).unwrap();
        assert_eq!(linear_predictor(&p, &state, &[3.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn predictor_matches_matrix_product() {
        let params = sec5();
        let state = LagState::from_lags(&[vec![1, 1]]).unwrap();
        let lam = linear_predictor(&params, &state, &[1.0]).unwrap();
        // independent route through nalgebra products
        let y = DVector::from_vec(vec![1.0, 1.0]);
        let x = DVector::from_vec(vec![1.0]);
        let oracle = params.c() + &params.a()[0] * y + params.b() * x;
        assert!((lam[0] - (-0.5)).abs() < 1e-15 && (lam[1] - 1.9).abs() < 1e-15);
        assert!((lam[0] - oracle[0]).abs() < 1e-15 && (lam[1] - oracle[1]).abs() < 1e-15);
    }

    #[test]
    fn predictor_dimension_mismatch() {
        assert!(linear_predictor(&sec5(), &LagState::zeros(1, 2), &[]).is_err());
        assert!(linear_predictor(&sec5(), &LagState::zeros(2, 2), &[0.0]).is_err());
    }

    #[test]
    fn step_examples() {
        let params = sec5();
        let ones = LagState::from_lags(&[vec![1, 1]]).unwrap();
        assert_eq!(step(&params, &ones, &[1.0], &[0.0, 0.0]).unwrap(), vec![0, 1]);
        let zero = ModelParams::new(
            vec![DMatrix::zeros(2, 2)],
            DMatrix::zeros(2, 0),
            DVector::zeros(2),
            DMatrix::identity(2, 2),
        )
        .unwrap();
        assert_eq!(step(&zero, &LagState::zeros(1, 2), &[], &[0.0, 0.0]).unwrap(), vec![0, 0]);
        let zeros = LagState::zeros(1, 2);
        assert_eq!(step(&params, &zeros, &[0.0], &[-0.3, 0.1]).unwrap(), vec![0, 1]);
    }

    #[test]
    fn lag_state_push_and_codes() {
        let mut s = LagState::from_lags(&[vec![1, 0], vec![0, 1]]).unwrap();
        s.push(&[1, 1]);
        assert_eq!(s.lag(1), &[1, 1]);
        assert_eq!(s.lag(2), &[1, 0]);
        let code = s.encode();
        assert_eq!(LagState::decode(code, 2, 2), s);
    }

    #[test]
    fn invalid_params_rejected() {
        let bad_r = DMatrix::from_row_slice(2, 2, &[1.0, 1.2, 1.2, 1.0]);
        assert!(ModelParams::new(vec![DMatrix::zeros(2, 2)], DMatrix::zeros(2, 0), DVector::zeros(2), bad_r).is_err());
        let nan_c = DVector::from_vec(vec![f64::NAN, 0.0]);
        assert!(ModelParams::new(vec![DMatrix::zeros(2, 2)], DMatrix::zeros(2, 0), nan_c, DMatrix::identity(2, 2)).is_err());
    }

    #[test]
    fn params_json_round_trip() {
        let params = sec5();
        let text = serde_json::to_string(&params).unwrap();
        let back: ModelParams = serde_json::from_str(&text).unwrap();
        assert_eq!(back, params);
        assert!(serde_json::from_str::<ModelParams>(r#"{"p":1,"k":2,"d":0,"A":[[[0,0]]],"B":[],"C":[0,0],"R":[[1,0],[0,1]]}"#).is_err());
    }

    #[test]
    fn panel_requires_common_shape() {
        let a = PathData::from_rows(&[vec![0, 1], vec![1, 1]], &[vec![0.1], vec![0.2]]).unwrap();
        let b = PathData::from_rows(&[vec![0, 1]], &[vec![0.1]]).unwrap();
        assert!(PanelData::new(vec![a.clone(), b]).is_err());
        assert_eq!(PanelData::new(vec![a.clone(), a]).unwrap().n(), 2);
        assert!(PathData::from_rows(&[vec![2]], &[]).is_err());
    }
}
