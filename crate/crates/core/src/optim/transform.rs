//! Spherical row-wise parameterization of the Cholesky factor of a
//! correlation matrix.
//!
//! `u` is split into blocks for rows `i = 1, ..., k-1` of the lower factor
//! `L`; block `i` has `i` entries. Row `i` takes the direction of its block
//! and the length `MAX_ROW_NORM · tanh(‖block‖)`, and `L(i,i)` completes the
//! row to unit norm.

use crate::error::{invalid, Result};
use crate::likelihood::{pairs, CorrParam};

/// Upper bound on the norm of the strictly-lower part of any row of `L`.
pub const MAX_ROW_NORM: f64 = 0.9987;

fn check_len(k: usize, len: usize) -> Result<()> {
    if k == 0 || len != k * (k - 1) / 2 {
        return Err(invalid(format!("expected {} transform coordinates for k = {k}", k * k.saturating_sub(1) / 2)));
    }
    Ok(())
}

/// Maps unconstrained coordinates to a positive definite correlation matrix.
pub fn corr_transform(k: usize, u: &[f64]) -> Result<CorrParam> {
    check_len(k, u.len())?;
    if u.iter().any(|v| !v.is_finite()) {
        return Err(invalid("non-finite transform coordinate"));
    }
    let mut l = vec![0.0; k * k];
    l[0] = 1.0;
    let mut offset = 0;
    for i in 1..k {
        let block = &u[offset..offset + i];
        offset += i;
        let norm = block.iter().map(|v| v * v).sum::<f64>().sqrt();
        let len = MAX_ROW_NORM * norm.tanh();
        if norm > 0.0 {
            for (j, v) in block.iter().enumerate() {
                l[i * k + j] = len * v / norm;
            }
        }
        l[i * k + i] = (1.0 - len * len).sqrt();
    }
    let r = pairs(k)
        .map(|(i, j)| (0..=i).map(|m| l[i * k + m] * l[j * k + m]).sum::<f64>())
        .collect();
    CorrParam::new_unchecked(k, r)
}

/// Inverse of [`corr_transform`]; fails when some row of the Cholesky factor
/// reaches `MAX_ROW_NORM`.
pub fn corr_untransform(corr: &CorrParam) -> Result<Vec<f64>> {
    let k = corr.k();
    let l = corr.cholesky_lower()?;
    let mut u = Vec::with_capacity(k * (k - 1) / 2);
    for i in 1..k {
        let row = &l[i * k..i * k + i];
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm >= MAX_ROW_NORM {
            return Err(invalid(format!(
                "correlation matrix is too close to singular to reparameterize (row {} norm {norm})",
                i + 1
            )));
        }
        let mag = (norm / MAX_ROW_NORM).atanh();
        u.extend(row.iter().map(|v| if norm > 0.0 { mag * v / norm } else { 0.0 }));
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_is_identity() {
        assert_eq!(corr_transform(4, &[0.0; 6]).unwrap(), CorrParam::identity(4));
        assert_eq!(corr_untransform(&CorrParam::identity(3)).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn bivariate_is_scaled_tanh() {
        for u in [-3.0, -0.4, 0.0, 0.25, 2.0] {
            let r = corr_transform(2, &[u]).unwrap().values()[0];
            assert!((r - MAX_ROW_NORM * f64::tanh(u)).abs() < 1e-15);
        }
    }

    #[test]
    fn random_points_give_valid_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let u: Vec<f64> = (0..6).map(|_| rng.random_range(-3.0..3.0)).collect();
            let c = corr_transform(4, &u).unwrap();
            assert!(c.is_positive_definite());
            let m = c.to_matrix();
            assert!((0..4).all(|i| m[(i, i)] == 1.0));
        }
    }

    #[test]
    fn extreme_magnitudes_stay_positive_definite() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let raw: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
            let u: Vec<f64> = raw.iter().map(|v| 1e3 * v / norm).collect();
            assert!(corr_transform(4, &u).unwrap().is_positive_definite());
        }
    }

    #[test]
    fn degenerate_matrix_rejected() {
        let c = CorrParam::new(2, vec![0.9995]).unwrap();
        assert!(corr_untransform(&c).is_err());
        assert!(corr_transform(3, &[0.0; 2]).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(u in proptest::collection::vec(-2.0f64..2.0, 6)) {
            let back = corr_untransform(&corr_transform(4, &u).unwrap()).unwrap();
            for (a, b) in u.iter().zip(&back) {
                prop_assert!((a - b).abs() < 1e-12, "{} vs {}", a, b);
            }
        }
    }
}
