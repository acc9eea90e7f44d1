use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{RawPanel, RawRecord};
use crate::error::{invalid, Error, Result};
use crate::rng;
use crate::stats::quantile_sorted;

/// Default binarization quantile (the first tercile).
pub const DEFAULT_QUANTILE: f64 = 1.0 / 3.0;

/// Per-series binarization quantiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinarizeSpec {
    pub default_quantile: f64,
    #[serde(default)]
    pub per_series: BTreeMap<String, f64>,
}

impl Default for BinarizeSpec {
    fn default() -> Self {
        Self {
            default_quantile: DEFAULT_QUANTILE,
            per_series: BTreeMap::new(),
        }
    }
}

impl BinarizeSpec {
    pub fn uniform(q: f64) -> Self {
        Self {
            default_quantile: q,
            per_series: BTreeMap::new(),
        }
    }

    pub fn quantile_for(&self, series: &str) -> f64 {
        self.per_series.get(series).copied().unwrap_or(self.default_quantile)
    }
}

fn values_by_series(panel: &RawPanel) -> HashMap<&str, Vec<f64>> {
    let mut out: HashMap<&str, Vec<f64>> = HashMap::new();
    for r in panel.records() {
        let entry = out.entry(r.series.as_str()).or_default();
        if let Some(v) = r.value {
            entry.push(v);
        }
    }
    out
}

/// Replaces every value by 0 when it is at most the pooled (all paths and
/// times) type-7 `q`-quantile of its series, and by 1 otherwise. Missing
/// values stay missing. Series listed in `skip` are copied unchanged.
pub fn binarize(panel: &RawPanel, spec: &BinarizeSpec, skip: &[String]) -> Result<RawPanel> {
    let mut thresholds: HashMap<&str, f64> = HashMap::new();
    for (series, mut values) in values_by_series(panel) {
        if skip.iter().any(|s| s == series) {
            continue;
        }
        let q = spec.quantile_for(series);
        if !(q > 0.0 && q < 1.0) {
            return Err(invalid(format!("quantile for `{series}` must lie in (0, 1), got {q}")));
        }
        if values.is_empty() {
            return Err(invalid(format!("series `{series}` has no observed values")));
        }
        if values.len() < 3 {
            return Err(invalid(format!(
                "series `{series}` has {} observed values; at least 3 are needed",
                values.len()
            )));
        }
        values.sort_by(f64::total_cmp);
        thresholds.insert(series, quantile_sorted(&values, q));
    }
    let records = panel
        .records()
        .iter()
        .map(|r| {
            let value = match thresholds.get(r.series.as_str()) {
                Some(&thr) => r.value.map(|v| if v <= thr { 0.0 } else { 1.0 }),
                None => r.value,
            };
            RawRecord { value, ..r.clone() }
        })
        .collect();
    Ok(RawPanel { records })
}

/// One imputed cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskEntry {
    pub path_id: String,
    pub time: i64,
    pub series: String,
    pub value: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Imputed {
    pub panel: RawPanel,
    pub mask: Vec<MaskEntry>,
}

/// Fills each missing cell of a binary series with an independent
/// Bernoulli(`p_s`) draw, `p_s` the pooled proportion of ones of the series.
/// Series `s` (in order of first appearance) draws from the stream derived
/// from `(seed, s)`.
pub fn impute(panel: &RawPanel, seed: u64) -> Result<Imputed> {
    let names = panel.series_names();
    let values = values_by_series(panel);
    let mut probs: HashMap<&str, f64> = HashMap::new();
    for name in &names {
        let vals = &values[name.as_str()];
        if vals.iter().any(|&v| v != 0.0 && v != 1.0) {
            return Err(invalid(format!("series `{name}` is not binary; binarize it first")));
        }
        if vals.len() < panel.records().iter().filter(|r| &r.series == name).count() {
            if vals.is_empty() {
                return Err(invalid(format!("series `{name}` has no observed values")));
            }
            probs.insert(name.as_str(), vals.iter().sum::<f64>() / vals.len() as f64);
        }
    }
    let mut streams: HashMap<&str, rng::StreamRng> = names
        .iter()
        .enumerate()
        .filter(|(_, n)| probs.contains_key(n.as_str()))
        .map(|(s, n)| (n.as_str(), rng::stream(seed, &[s as u64])))
        .collect();
    let mut mask = Vec::new();
    let records = panel
        .records()
        .iter()
        .map(|r| {
            if r.value.is_some() {
                return r.clone();
            }
            let p = probs[r.series.as_str()];
            let rng = streams.get_mut(r.series.as_str()).expect("stream per incomplete series");
            let v = u8::from(rng.random::<f64>() < p);
            mask.push(MaskEntry {
                path_id: r.path_id.clone(),
                time: r.time,
                series: r.series.clone(),
                value: v,
            });
            RawRecord {
                value: Some(f64::from(v)),
                ..r.clone()
            }
        })
        .collect();
    Ok(Imputed {
        panel: RawPanel { records },
        mask,
    })
}

/// Writes the imputation mask as `path_id,time,series,value`.
pub fn save_mask_csv(mask: &[MaskEntry], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    for m in mask {
        w.serialize(m)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
