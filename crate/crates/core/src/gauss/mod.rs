//! Gaussian kernels: the univariate CDF/PDF, bivariate rectangle
//! probabilities by adaptive Gauss–Legendre quadrature, their derivative in
//! the correlation, and a GHK sampler for k-dimensional rectangles.

mod ghk;
mod quadrature;

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use statrs::function::erf::erfc_inv;

use crate::error::{invalid, Result};

pub use ghk::{rect_k_ghk, GhkEstimate, GhkSampler, RectKSpec};
pub use quadrature::integrate_adaptive;

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Half-width beyond which the standard normal density is ignored.
pub const TRUNCATION: f64 = 8.5;

/// Relative tolerance between successive quadrature refinements.
const QUAD_REL_TOL: f64 = 1e-12;

/// `Φ(-38.5)` underflows to zero.
const INNER_CUTOFF: f64 = 38.5;

/// Standard normal CDF, evaluated through `erfc` so both tails keep full
/// relative precision.
#[inline]
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

#[inline]
pub fn std_normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal quantile function: an `erfc⁻¹` starting value polished
/// by one Halley step on [`std_normal_cdf`].
#[inline]
pub fn std_normal_inv(p: f64) -> f64 {
    let x = -SQRT_2 * erfc_inv(2.0 * p);
    if !x.is_finite() {
        return x;
    }
    let pdf = std_normal_pdf(x);
    if pdf <= 0.0 {
        return x;
    }
    let u = (std_normal_cdf(x) - p) / pdf;
    x - u / (1.0 + 0.5 * x * u)
}

/// Probability of `Y_i = s_i, Y_j = s_j` when `Y = 1(lam + eps > 0)` and
/// `eps` is a standard bivariate normal with correlation `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect2Spec {
    pub lam_i: f64,
    pub lam_j: f64,
    pub r: f64,
    pub s_i: u8,
    pub s_j: u8,
}

impl Rect2Spec {
    pub fn new(lam_i: f64, lam_j: f64, r: f64, s_i: u8, s_j: u8) -> Self {
        Self {
            lam_i,
            lam_j,
            r,
            s_i,
            s_j,
        }
    }

    /// The same rectangle with the two coordinates swapped.
    pub fn swapped(&self) -> Self {
        Self::new(self.lam_j, self.lam_i, self.r, self.s_j, self.s_i)
    }

    fn validate(&self) -> Result<()> {
        if !(self.r.abs() < 1.0) {
            return Err(invalid(format!("correlation {} outside (-1, 1)", self.r)));
        }
        if self.s_i > 1 || self.s_j > 1 {
            return Err(invalid("outcomes must be 0 or 1"));
        }
        if !self.lam_i.is_finite() || !self.lam_j.is_finite() {
            return Err(invalid("non-finite linear predictor"));
        }
        Ok(())
    }
}

#[inline]
fn sign(s: u8) -> f64 {
    if s == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Integration range for `x_i` in `I_{s_i} - lam_i`, truncated to the
/// effective support of the normal density.
fn outer_interval(lam_i: f64, s_i: u8) -> (f64, f64) {
    let edge = -lam_i;
    if s_i == 0 {
        // (-inf, -lam_i]
        if edge > -TRUNCATION {
            (-TRUNCATION, edge.min(TRUNCATION))
        } else {
            (edge - TRUNCATION, edge)
        }
    } else if edge < TRUNCATION {
        (edge.max(-TRUNCATION), TRUNCATION)
    } else {
        (edge, edge + TRUNCATION)
    }
}

/// Bivariate rectangle probability
/// `∫_{I_{s_i} - λ_i} Φ((2 s_j - 1)(λ_j + r x) / √(1 - r²)) φ(x) dx`.
pub fn rect2(spec: &Rect2Spec) -> Result<f64> {
    spec.validate()?;
    Ok(rect2_unchecked(spec))
}

pub(crate) fn rect2_unchecked(spec: &Rect2Spec) -> f64 {
    let (mut a, mut b) = outer_interval(spec.lam_i, spec.s_i);
    let sj = sign(spec.s_j);
    let scale = 1.0 / (1.0 - spec.r * spec.r).sqrt();
    let lam_j = spec.lam_j;
    let r = spec.r;
    // drop the range where the inner CDF underflows
    let slope = sj * r;
    let cut = (-INNER_CUTOFF / scale - sj * lam_j) / slope;
    if slope > 0.0 {
        a = a.max(cut);
    } else if slope < 0.0 {
        b = b.min(cut);
    } else if sj * lam_j * scale < -INNER_CUTOFF {
        return 0.0;
    }
    if !(b > a) {
        return 0.0;
    }
    let integrand = |x: f64| std_normal_cdf(sj * (lam_j + r * x) * scale) * std_normal_pdf(x);
    integrate_adaptive(&integrand, a, b, QUAD_REL_TOL).clamp(0.0, 1.0)
}

/// Derivative of [`rect2`] with respect to `r`.
///
/// Uses `∂P/∂r = (2s_i-1)(2s_j-1) φ(λ_i) φ((λ_j - r λ_i)/√(1-r²)) / √(1-r²)`,
/// the bivariate normal density at `(λ_i, λ_j)` with the orthant signs
/// folded in.
pub fn rect2_dr(spec: &Rect2Spec) -> Result<f64> {
    spec.validate()?;
    Ok(rect2_dr_unchecked(spec))
}

pub(crate) fn rect2_dr_unchecked(spec: &Rect2Spec) -> f64 {
    let root = (1.0 - spec.r * spec.r).sqrt();
    let density = std_normal_pdf(spec.lam_i) * std_normal_pdf((spec.lam_j - spec.r * spec.lam_i) / root)
        / root;
    sign(spec.s_i) * sign(spec.s_j) * density
}
