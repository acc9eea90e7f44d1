//! Long-format panel CSV I/O, quantile binarization, missing-value
//! imputation, assembly of model-ready panels, and the `PAR1` binary trace
//! format.
//!
//! The CSV schema has the header `path_id,time,series,value`; an empty
//! `value` marks a missing observation.

mod assemble;
mod prep;
mod trace;

pub use assemble::{assemble, Assembled};
pub use prep::{binarize, impute, save_mask_csv, BinarizeSpec, Imputed, MaskEntry, DEFAULT_QUANTILE};
pub use trace::{read_trace, write_trace, TRACE_MAGIC};

use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::PanelData;

/// One observation of one series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRecord {
    pub path_id: String,
    pub time: i64,
    pub series: String,
    pub value: Option<f64>,
}

/// Long-format observations with unique `(path_id, time, series)` keys.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawPanel {
    records: Vec<RawRecord>,
}

impl RawPanel {
    pub fn new(records: Vec<RawRecord>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(records.len());
        for (idx, r) in records.iter().enumerate() {
            if !seen.insert((&r.path_id, r.time, &r.series)) {
                return Err(invalid(format!(
                    "record {}: duplicate key ({}, {}, {})",
                    idx + 1,
                    r.path_id,
                    r.time,
                    r.series
                )));
            }
            if r.value.is_some_and(|v| !v.is_finite()) {
                return Err(invalid(format!("record {}: non-finite value", idx + 1)));
            }
        }
        Ok(Self { records })
    }

    /// Long-format view of a model panel: paths `1..=n`, times `1..=T`,
    /// responses before covariates.
    pub fn from_panel(data: &PanelData) -> Self {
        let mut records = Vec::with_capacity(data.n() * data.horizon() * (data.k() + data.d()));
        for (j, path) in data.paths().iter().enumerate() {
            for t in 0..path.len() {
                for (i, name) in data.response_names().iter().enumerate() {
                    records.push(RawRecord {
                        path_id: (j + 1).to_string(),
                        time: t as i64 + 1,
                        series: name.clone(),
                        value: Some(f64::from(path.y(t)[i])),
                    });
                }
                for (m, name) in data.covariate_names().iter().enumerate() {
                    records.push(RawRecord {
                        path_id: (j + 1).to_string(),
                        time: t as i64 + 1,
                        series: name.clone(),
                        value: Some(path.x(t)[m]),
                    });
                }
            }
        }
        Self { records }
    }

    pub fn records(&self) -> &[RawRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Series names in order of first appearance.
    pub fn series_names(&self) -> Vec<String> {
        first_seen(self.records.iter().map(|r| &r.series))
    }

    /// Path ids in order of first appearance.
    pub fn path_ids(&self) -> Vec<String> {
        first_seen(self.records.iter().map(|r| &r.path_id))
    }

    pub fn missing_count(&self) -> usize {
        self.records.iter().filter(|r| r.value.is_none()).count()
    }

    pub fn into_records(self) -> Vec<RawRecord> {
        self.records
    }
}

fn first_seen<'a>(names: impl Iterator<Item = &'a String>) -> Vec<String> {
    let mut seen = HashSet::new();
    names.filter(|n| seen.insert(*n)).cloned().collect()
}

const HEADER: [&str; 4] = ["path_id", "time", "series", "value"];

/// Parses the long CSV schema from any reader; `source` names the input in
/// error messages.
pub fn read_csv<R: Read>(reader: R, source: &str) -> Result<RawPanel> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::Row {
            path: source.to_string(),
            row: 1,
            message: format!("missing column `{name}` (expected header {})", HEADER.join(",")),
        })
    };
    let (c_path, c_time, c_series, c_value) = (col("path_id")?, col("time")?, col("series")?, col("value")?);
    let mut records = Vec::new();
    let mut seen: HashSet<(String, i64, String)> = HashSet::new();
    for row in rdr.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::Row {
                path: source.to_string(),
                row: line,
                message: e.to_string(),
            }
        })?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let fail = |message: String| Error::Row {
            path: source.to_string(),
            row: line,
            message,
        };
        let field = |c: usize| row.get(c).unwrap_or("");
        let path_id = field(c_path).to_string();
        if path_id.is_empty() {
            return Err(fail("empty path_id".to_string()));
        }
        let time: i64 = field(c_time)
            .parse()
            .map_err(|_| fail(format!("time `{}` is not an integer", field(c_time))))?;
        let series = field(c_series).to_string();
        if series.is_empty() {
            return Err(fail("empty series name".to_string()));
        }
        let raw = field(c_value);
        let value = if raw.is_empty() {
            None
        } else {
            let v: f64 = raw.parse().map_err(|_| fail(format!("value `{raw}` is not numeric")))?;
            if !v.is_finite() {
                return Err(fail(format!("value `{raw}` is not finite")));
            }
            Some(v)
        };
        if !seen.insert((path_id.clone(), time, series.clone())) {
            return Err(fail(format!("duplicate key ({path_id}, {time}, {series})")));
        }
        records.push(RawRecord {
            path_id,
            time,
            series,
            value,
        });
    }
    Ok(RawPanel { records })
}

/// Reads a long-format panel CSV file.
pub fn load_csv(path: impl AsRef<Path>) -> Result<RawPanel> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(std::io::BufReader::new(file), &path.display().to_string())
}

/// Writes the long CSV schema; values use the shortest representation that
/// parses back to the same number.
pub fn write_csv<W: Write>(panel: &RawPanel, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(HEADER)?;
    for r in &panel.records {
        let value = r.value.map(|v| v.to_string()).unwrap_or_default();
        w.write_record([r.path_id.as_str(), &r.time.to_string(), r.series.as_str(), &value])?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

pub fn save_csv(panel: &RawPanel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(panel, std::io::BufWriter::new(file))
}

/// Writes a model panel in the long CSV schema.
pub fn save_panel_csv(data: &PanelData, path: impl AsRef<Path>) -> Result<()> {
    save_csv(&RawPanel::from_panel(data), path)
}
