use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{check_correlation, lower_cholesky};
use crate::model::{Dims, ModelParams};

/// Flattened regression parameter: the columns of `C, A_1, ..., A_p, B`
/// stacked in that order.
///
/// Equivalently, with `Θ = [C | A_1 | ... | A_p | B]` (a `k x (1 + p·k + d)`
/// table), entry `m·k + i` of the vector is `Θ(i, m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaVec {
    dims: Dims,
    values: Vec<f64>,
}

impl GammaVec {
    pub fn new(dims: Dims, values: Vec<f64>) -> Result<Self> {
        if values.len() != dims.gamma_len() {
            return Err(invalid(format!(
                "gamma has length {}, expected k(1 + pk + d) = {}",
                values.len(),
                dims.gamma_len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("non-finite gamma entry"));
        }
        Ok(Self { dims, values })
    }

    pub fn zeros(dims: Dims) -> Self {
        Self {
            dims,
            values: vec![0.0; dims.gamma_len()],
        }
    }

    pub fn from_params(params: &ModelParams) -> Self {
        let dims = params.dims();
        let q = dims.regressors();
        let rows = params.coefficient_rows();
        let mut values = vec![0.0; dims.gamma_len()];
        for i in 0..dims.k {
            for m in 0..q {
                values[m * dims.k + i] = rows[i * q + m];
            }
        }
        Self { dims, values }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Position of `Θ(i, m)` in the flat vector.
    #[inline]
    pub fn index(&self, i: usize, m: usize) -> usize {
        m * self.dims.k + i
    }

    /// Coefficients of equation `i`: `(C_i, A_1(i,·), ..., A_p(i,·), B(i,·))`.
    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.dims.regressors()).map(|m| self.values[self.index(i, m)]).collect()
    }

    pub fn set_row(&mut self, i: usize, row: &[f64]) {
        assert_eq!(row.len(), self.dims.regressors());
        for (m, v) in row.iter().enumerate() {
            let idx = self.index(i, m);
            self.values[idx] = *v;
        }
    }

    pub fn c(&self, i: usize) -> f64 {
        self.values[self.index(i, 0)]
    }

    /// `A_lag(i, j)` with `lag` in `1..=p`.
    pub fn a(&self, lag: usize, i: usize, j: usize) -> f64 {
        self.values[self.index(i, 1 + (lag - 1) * self.dims.k + j)]
    }

    pub fn b(&self, i: usize, m: usize) -> f64 {
        self.values[self.index(i, 1 + self.dims.p * self.dims.k + m)]
    }

    /// Rebuilds the full parameter set with noise correlation `corr`.
    pub fn to_params(&self, corr: &CorrParam) -> Result<ModelParams> {
        let Dims { p, k, d } = self.dims;
        if corr.k() != k {
            return Err(invalid("correlation dimension does not match gamma"));
        }
        let a = (1..=p)
            .map(|l| DMatrix::from_fn(k, k, |i, j| self.a(l, i, j)))
            .collect();
        let b = DMatrix::from_fn(k, d, |i, m| self.b(i, m));
        let c = DVector::from_fn(k, |i, _| self.c(i));
        ModelParams::new(a, b, c, corr.to_matrix())
    }

    /// Human-readable parameter names in vector order.
    pub fn labels(&self) -> Vec<String> {
        let Dims { p, k, d } = self.dims;
        let mut out = vec![String::new(); self.values.len()];
        for i in 0..k {
            out[self.index(i, 0)] = format!("C({})", i + 1);
            for l in 1..=p {
                for j in 0..k {
                    let name = if p == 1 { "A".to_string() } else { format!("A{l}") };
                    out[self.index(i, 1 + (l - 1) * k + j)] = format!("{name}({},{})", i + 1, j + 1);
                }
            }
            for m in 0..d {
                out[self.index(i, 1 + p * k + m)] = if d == 1 {
                    format!("B({})", i + 1)
                } else {
                    format!("B({},{})", i + 1, m + 1)
                };
            }
        }
        out
    }
}

/// Noise correlations `r = (R(1,2), ..., R(1,k), R(2,3), ..., R(k-1,k))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrParam {
    k: usize,
    r: Vec<f64>,
}

/// Position of `R(i, j)`, `i < j`, in the pair ordering.
pub fn pair_index(k: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < k);
    i * k - i * (i + 1) / 2 + (j - i - 1)
}

/// All pairs `(i, j)`, `i < j`, in the pair ordering.
pub fn pairs(k: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..k).flat_map(move |i| (i + 1..k).map(move |j| (i, j)))
}

impl CorrParam {
    /// Validates that the correlations form a positive definite matrix.
    pub fn new(k: usize, r: Vec<f64>) -> Result<Self> {
        let out = Self::new_unchecked(k, r)?;
        check_correlation(&out.to_matrix()).map_err(Error::InvalidArgument)?;
        Ok(out)
    }

    /// Checks only the length and the `(-1, 1)` range of each entry; the
    /// joint matrix may fail to be positive definite.
    pub fn new_unchecked(k: usize, r: Vec<f64>) -> Result<Self> {
        if k == 0 || r.len() != k * (k - 1) / 2 {
            return Err(invalid(format!("expected {} correlations for k = {k}", k * k.saturating_sub(1) / 2)));
        }
        if r.iter().any(|v| !(v.abs() < 1.0)) {
            return Err(invalid("correlations must lie in (-1, 1)"));
        }
        Ok(Self { k, r })
    }

    pub fn identity(k: usize) -> Self {
        Self {
            k,
            r: vec![0.0; k * (k - 1) / 2],
        }
    }

    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self> {
        check_correlation(m).map_err(Error::InvalidArgument)?;
        let k = m.nrows();
        Ok(Self {
            k,
            r: pairs(k).map(|(i, j)| m[(i, j)]).collect(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn values(&self) -> &[f64] {
        &self.r
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 1.0,
            std::cmp::Ordering::Less => self.r[pair_index(self.k, i, j)],
            std::cmp::Ordering::Greater => self.r[pair_index(self.k, j, i)],
        }
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.k, self.k, |i, j| self.get(i, j))
    }

    pub fn is_positive_definite(&self) -> bool {
        lower_cholesky(&self.to_matrix()).is_some()
    }

    /// Row-major lower Cholesky factor `L` with `R = L Lᵀ`; each row has unit
    /// norm and the strictly-lower part of row `i` has norm below one.
    pub fn cholesky_lower(&self) -> Result<Vec<f64>> {
        lower_cholesky(&self.to_matrix()).ok_or_else(|| invalid("correlation matrix is not positive definite"))
    }

    pub fn labels(&self) -> Vec<String> {
        pairs(self.k).map(|(i, j)| format!("R({},{})", i + 1, j + 1)).collect()
    }
}
