use std::collections::HashMap;

use super::{RawPanel, RawRecord};
use crate::error::{invalid, Result};
use crate::model::{PanelData, PathData};

/// A model panel built from long records, with the path ids and the first
/// calendar time kept for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct Assembled {
    pub data: PanelData,
    pub path_ids: Vec<String>,
    pub first_time: i64,
    pub warnings: Vec<String>,
}

impl Assembled {
    pub fn path_by_id(&self, id: &str) -> Option<&PathData> {
        self.path_ids.iter().position(|p| p == id).map(|j| self.data.path(j))
    }

    /// Long records with the original path ids and calendar times.
    pub fn to_raw(&self) -> RawPanel {
        let data = &self.data;
        let mut records = Vec::with_capacity(data.n() * data.horizon() * (data.k() + data.d()));
        for (id, path) in self.path_ids.iter().zip(data.paths()) {
            for t in 0..path.len() {
                let time = self.first_time + t as i64;
                let ys = data.response_names().iter().zip(path.y(t)).map(|(s, &v)| (s, f64::from(v)));
                let xs = data.covariate_names().iter().zip(path.x(t)).map(|(s, &v)| (s, v));
                for (series, v) in ys.chain(xs) {
                    records.push(RawRecord {
                        path_id: id.clone(),
                        time,
                        series: series.clone(),
                        value: Some(v),
                    });
                }
            }
        }
        RawPanel { records }
    }
}

/// Selects response and covariate series from a complete long panel.
///
/// Every path is cut to the time range shared by all paths and all selected
/// series; a warning is recorded when that drops anything. The covariate
/// stored at time `t` is the one consumed by the predictor at `t + 1`.
pub fn assemble(panel: &RawPanel, responses: &[String], covariates: &[String]) -> Result<Assembled> {
    if responses.is_empty() {
        return Err(invalid("at least one response series is required"));
    }
    let selected: Vec<&String> = responses.iter().chain(covariates).collect();
    for (a, s) in selected.iter().enumerate() {
        if selected[..a].contains(s) {
            return Err(invalid(format!("series `{s}` selected twice")));
        }
    }
    let known = panel.series_names();
    for s in &selected {
        if !known.contains(s) {
            return Err(invalid(format!("unknown series `{s}`")));
        }
    }
    let column: HashMap<&str, usize> = selected.iter().enumerate().map(|(c, s)| (s.as_str(), c)).collect();
    let path_ids = panel.path_ids();
    let row: HashMap<&str, usize> = path_ids.iter().enumerate().map(|(j, p)| (p.as_str(), j)).collect();

    // cells[path][column] : time -> value
    let mut cells: Vec<Vec<HashMap<i64, Option<f64>>>> = vec![vec![HashMap::new(); selected.len()]; path_ids.len()];
    for r in panel.records() {
        if let Some(&c) = column.get(r.series.as_str()) {
            cells[row[r.path_id.as_str()]][c].insert(r.time, r.value);
        }
    }

    let (mut lo, mut hi) = (i64::MIN, i64::MAX);
    let mut spans = Vec::new();
    for (j, path) in cells.iter().enumerate() {
        for (c, col) in path.iter().enumerate() {
            let (Some(&min), Some(&max)) = (col.keys().min(), col.keys().max()) else {
                return Err(invalid(format!("path `{}` has no records for series `{}`", path_ids[j], selected[c])));
            };
            lo = lo.max(min);
            hi = hi.min(max);
            spans.push((min, max));
        }
    }
    if lo > hi {
        return Err(invalid("the selected series share no common time range"));
    }
    let mut warnings = Vec::new();
    if spans.iter().any(|&(a, b)| a != lo || b != hi) {
        warnings.push(format!("paths truncated to the common time range {lo}..={hi}"));
    }

    let (k, d) = (responses.len(), covariates.len());
    let horizon = (hi - lo + 1) as usize;
    let mut paths = Vec::with_capacity(path_ids.len());
    for (j, path) in cells.iter().enumerate() {
        let mut y = Vec::with_capacity(horizon * k);
        let mut x = Vec::with_capacity(horizon * d);
        for t in lo..=hi {
            for (c, col) in path.iter().enumerate() {
                let v = match col.get(&t) {
                    Some(Some(v)) => *v,
                    Some(None) => {
                        return Err(invalid(format!(
                            "missing value for path `{}`, time {t}, series `{}`; impute first",
                            path_ids[j], selected[c]
                        )))
                    }
                    None => {
                        return Err(invalid(format!(
                            "path `{}` series `{}` has no record at time {t}",
                            path_ids[j], selected[c]
                        )))
                    }
                };
                if c < k {
                    if v != 0.0 && v != 1.0 {
                        return Err(invalid(format!("response series `{}` is not binary: {v}", selected[c])));
                    }
                    y.push(v as u8);
                } else {
                    x.push(v);
                }
            }
        }
        paths.push(PathData::new(k, d, y, x)?);
    }
    let data = PanelData::with_names(paths, responses.to_vec(), covariates.to_vec())?;
    Ok(Assembled {
        data,
        path_ids,
        first_time: lo,
        warnings,
    })
}
