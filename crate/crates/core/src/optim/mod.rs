//! Derivative-free maximizers and the unconstrained parameterization of
//! correlation matrices.

mod brent;
mod nelder_mead;
mod transform;

pub use brent::brent_max;
pub use nelder_mead::{nelder_mead, NelderMeadResult};
pub use transform::{corr_transform, corr_untransform, MAX_ROW_NORM};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Stopping rules for [`nelder_mead`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimOptions {
    /// Iteration budget; `None` means `2000 · dim`.
    pub max_iters: Option<usize>,
    /// Largest allowed spread of objective values over the simplex.
    pub f_tol: f64,
    /// Largest allowed distance from the best vertex to any other vertex.
    pub x_tol: f64,
    /// Offset along each axis for the vertices of the starting simplex.
    pub simplex_init_step: f64,
    /// Fresh simplices built around the optimum after convergence.
    pub max_restarts: usize,
}

impl Default for OptimOptions {
    fn default() -> Self {
        Self {
            max_iters: None,
            f_tol: 1e-9,
            x_tol: 1e-7,
            simplex_init_step: 0.2,
            max_restarts: 2,
        }
    }
}

impl OptimOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.f_tol > 0.0 && self.x_tol > 0.0) {
            return Err(invalid("optimizer tolerances must be positive"));
        }
        if self.max_iters == Some(0) {
            return Err(invalid("max_iters must be >= 1"));
        }
        if !(self.simplex_init_step > 0.0 && self.simplex_init_step.is_finite()) {
            return Err(invalid("simplex_init_step must be positive"));
        }
        Ok(())
    }

    pub fn iteration_budget(&self, dim: usize) -> usize {
        self.max_iters.unwrap_or(2000 * dim.max(1))
    }
}
