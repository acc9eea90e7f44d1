use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::OptimOptions;
use crate::error::{invalid, Result};

/// Outcome of [`nelder_mead`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub restarts: usize,
    pub converged: bool,
}

struct Vertex {
    x: Vec<f64>,
    f: f64,
}

/// Higher objective first; ties go to the lexicographically smaller point.
fn rank(a: &Vertex, b: &Vertex) -> Ordering {
    b.f.total_cmp(&a.f).then_with(|| {
        a.x.iter()
            .zip(&b.x)
            .map(|(u, v)| u.total_cmp(v))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

/// Maximizes `objective` by the Nelder–Mead simplex method.
///
/// A run stops when the spread of objective values over the simplex is at
/// most `f_tol` and every vertex lies within `x_tol` (sup-norm) of the best
/// one, or when the iteration budget is spent. After convergence a fresh
/// simplex is built around the best point, up to `max_restarts` times, for
/// as long as a restart still improves the objective by more than `f_tol`.
/// Non-finite objective values count as `-∞`.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut objective: F,
    x0: &[f64],
    opts: &OptimOptions,
) -> Result<NelderMeadResult> {
    opts.validate()?;
    let n = x0.len();
    if n == 0 {
        return Err(invalid("nelder_mead needs at least one parameter"));
    }
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = objective(x);
        if v.is_finite() {
            v
        } else {
            f64::NEG_INFINITY
        }
    };
    let f0 = eval(x0);
    if !f0.is_finite() {
        return Err(invalid("objective is not finite at the starting point"));
    }
    let budget = opts.iteration_budget(n);
    let mut iterations = 0usize;
    let mut restarts = 0usize;
    let mut best = Vertex { x: x0.to_vec(), f: f0 };
    let mut converged;

    loop {
        let mut simplex = vec![Vertex { x: best.x.clone(), f: best.f }];
        for i in 0..n {
            let mut x = best.x.clone();
            x[i] += opts.simplex_init_step;
            let f = eval(&x);
            simplex.push(Vertex { x, f });
        }
        converged = false;
        while iterations < budget {
            simplex.sort_by(rank);
            let f_spread = simplex[0].f - simplex[n].f;
            let diameter = simplex[1..]
                .iter()
                .flat_map(|v| v.x.iter().zip(&simplex[0].x).map(|(a, b)| (a - b).abs()))
                .fold(0.0f64, f64::max);
            if f_spread <= opts.f_tol && diameter <= opts.x_tol {
                converged = true;
                break;
            }
            iterations += 1;

            let centroid: Vec<f64> = (0..n)
                .map(|j| simplex[..n].iter().map(|v| v.x[j]).sum::<f64>() / n as f64)
                .collect();
            let along = |t: f64, worst: &[f64]| -> Vec<f64> {
                centroid.iter().zip(worst).map(|(c, w)| c + t * (c - w)).collect()
            };
            let worst = simplex[n].x.clone();
            let xr = along(1.0, &worst);
            let fr = eval(&xr);
            if fr > simplex[0].f {
                let xe = along(2.0, &worst);
                let fe = eval(&xe);
                simplex[n] = if fe > fr { Vertex { x: xe, f: fe } } else { Vertex { x: xr, f: fr } };
                continue;
            }
            if fr > simplex[n - 1].f {
                simplex[n] = Vertex { x: xr, f: fr };
                continue;
            }
            let outside = fr > simplex[n].f;
            let xc = along(if outside { 0.5 } else { -0.5 }, &worst);
            let fc = eval(&xc);
            if (outside && fc >= fr) || (!outside && fc > simplex[n].f) {
                simplex[n] = Vertex { x: xc, f: fc };
                continue;
            }
            let top = simplex[0].x.clone();
            for v in simplex.iter_mut().skip(1) {
                v.x = top.iter().zip(&v.x).map(|(b, x)| b + 0.5 * (x - b)).collect();
                v.f = eval(&v.x);
            }
        }
        simplex.sort_by(rank);
        let improved = simplex[0].f - best.f;
        let old = std::mem::replace(&mut best, simplex.swap_remove(0));
        if rank(&old, &best) == Ordering::Less {
            best = old;
        }
        if !converged || restarts >= opts.max_restarts || (restarts > 0 && improved <= opts.f_tol) {
            break;
        }
        restarts += 1;
    }

    Ok(NelderMeadResult {
        x: best.x,
        f: best.f,
        iterations,
        evaluations,
        restarts,
        converged,
    })
}
