use nalgebra::{Cholesky, DMatrix};

/// Row-major lower Cholesky factor of a symmetric matrix, or `None` when the
/// matrix is not positive definite.
pub fn lower_cholesky(m: &DMatrix<f64>) -> Option<Vec<f64>> {
    if !m.is_square() || m.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let l = Cholesky::new(m.clone())?.unpack();
    if l.diagonal().iter().any(|&d| !(d > 0.0)) {
        return None;
    }
    let n = l.nrows();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(l[(i, j)]);
        }
    }
    Some(out)
}

/// Checks that `m` is a correlation matrix: symmetric, unit diagonal,
/// off-diagonals in (-1, 1) and positive definite.
pub fn check_correlation(m: &DMatrix<f64>) -> Result<(), String> {
    if !m.is_square() {
        return Err("correlation matrix must be square".into());
    }
    let k = m.nrows();
    for i in 0..k {
        if (m[(i, i)] - 1.0).abs() > 1e-12 {
            return Err(format!("diagonal entry {i} is {} instead of 1", m[(i, i)]));
        }
        for j in 0..i {
            let v = m[(i, j)];
            if (v - m[(j, i)]).abs() > 1e-12 {
                return Err(format!("matrix is not symmetric at ({i}, {j})"));
            }
            if !(v.abs() < 1.0) {
                return Err(format!("entry ({i}, {j}) = {v} outside (-1, 1)"));
            }
        }
    }
    if lower_cholesky(m).is_none() {
        return Err("correlation matrix is not positive definite".into());
    }
    Ok(())
}
