use crate::error::{invalid, Result};
use crate::likelihood::{pairs, CorrParam, GammaVec};
use crate::model::{Dims, PanelData};
use crate::stats::correlation;

/// Largest magnitude of an initial correlation guess.
pub const INIT_R_CLIP: f64 = 0.95;

/// Starting values for the regression parameters with notes on any
/// degenerate column.
#[derive(Debug, Clone, PartialEq)]
pub struct InitGuess {
    pub gamma: GammaVec,
    pub notes: Vec<String>,
}

/// Count-based starting values for `γ`:
///
/// * `C(k) = 2 p_k - 1` with `p_k` the presence proportion over all paths
///   and times;
/// * `A_l(k, m)` is the number of times `m` present at `t` is followed by `k`
///   present at `t + l`, minus the number of all other lag-`l` transitions
///   of that pair, divided by the number of time steps `n·T`;
/// * `B(k, m)` is the correlation of `Y_{k,t}` with `X_{m,t-1}` computed
///   within each path and averaged over the paths where both vary; zero
///   (with a note) when no path has variation.
pub fn init_gamma(data: &PanelData, p: usize) -> Result<InitGuess> {
    let dims = Dims::new(p, data.k(), data.d())?;
    let t_len = data.horizon();
    if t_len <= p {
        return Err(invalid(format!("horizon T = {t_len} must exceed the lag order p = {p}")));
    }
    let Dims { k, d, .. } = dims;
    let mut gamma = GammaVec::zeros(dims);
    let mut notes = Vec::new();
    let steps = (data.n() * t_len) as f64;

    let mut row = vec![0.0; dims.regressors()];
    for i in 0..k {
        let present: usize = data
            .paths()
            .iter()
            .map(|path| (0..t_len).filter(|&t| path.y(t)[i] == 1).count())
            .sum();
        row[0] = 2.0 * present as f64 / steps - 1.0;

        for l in 1..=p {
            for m in 0..k {
                let (mut both, mut total) = (0usize, 0usize);
                for path in data.paths() {
                    for t in l..t_len {
                        total += 1;
                        if path.y(t - l)[m] == 1 && path.y(t)[i] == 1 {
                            both += 1;
                        }
                    }
                }
                let other = total - both;
                row[1 + (l - 1) * k + m] = (both as f64 - other as f64) / steps;
            }
        }

        for m in 0..d {
            let per_path: Vec<f64> = data
                .paths()
                .iter()
                .filter_map(|path| {
                    let y: Vec<f64> = (1..t_len).map(|t| f64::from(path.y(t)[i])).collect();
                    let x: Vec<f64> = (1..t_len).map(|t| path.x(t - 1)[m]).collect();
                    correlation(&y, &x)
                })
                .collect();
            row[1 + p * k + m] = if per_path.is_empty() {
                notes.push(format!(
                    "B({},{}) initialized to 0: response or covariate is constant on every path",
                    i + 1,
                    m + 1
                ));
                0.0
            } else {
                per_path.iter().sum::<f64>() / per_path.len() as f64
            };
        }
        gamma.set_row(i, &row);
    }
    Ok(InitGuess { gamma, notes })
}

/// Pooled Pearson correlation of every response pair over all paths and
/// times, clipped to `±0.95`; zero for a constant response.
pub fn init_r(data: &PanelData) -> CorrParam {
    let k = data.k();
    let cols: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            data.paths()
                .iter()
                .flat_map(|path| (0..path.len()).map(move |t| f64::from(path.y(t)[i])))
                .collect()
        })
        .collect();
    let r: Vec<f64> = pairs(k)
        .map(|(i, j)| correlation(&cols[i], &cols[j]).unwrap_or(0.0).clamp(-INIT_R_CLIP, INIT_R_CLIP))
        .collect();
    let out = CorrParam::new_unchecked(k, r).expect("clipped correlations lie in (-1, 1)");
    if out.is_positive_definite() {
        out
    } else {
        super::shrink_to_pd(&out).0
    }
}
