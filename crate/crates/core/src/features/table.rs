//! `features.csv`: segment key columns followed by the feature columns in
//! [`FEATURE_NAMES`] order.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::vector::{FeatureVector, FEATURE_NAMES, N_FEATURES};
use crate::corpus::round_ms;
use crate::error::{Error, Result};
use crate::num::Scalar;

const KEY_COLUMNS: [&str; 3] = ["video_id", "start_s", "end_s"];

/// Identifies an audio segment; times are on the millisecond grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SegmentKey {
    pub video_id: String,
    pub start_ms: i64,
    pub end_ms: i64,
}

impl SegmentKey {
    pub fn new(video_id: impl Into<String>, start_s: f64, end_s: f64) -> Self {
        Self {
            video_id: video_id.into(),
            start_ms: (round_ms(start_s) * 1000.0).round() as i64,
            end_ms: (round_ms(end_s) * 1000.0).round() as i64,
        }
    }

    pub fn start_s(&self) -> f64 {
        self.start_ms as f64 / 1000.0
    }

    pub fn end_s(&self) -> f64 {
        self.end_ms as f64 / 1000.0
    }
}

pub fn export_features<T: Scalar>(path: impl AsRef<Path>, rows: &[(SegmentKey, FeatureVector<T>)]) -> Result<()> {
    let path = path.as_ref();
    let err = |e: csv::Error| Error::Validation(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    let header: Vec<&str> = KEY_COLUMNS.iter().chain(FEATURE_NAMES.iter()).copied().collect();
    w.write_record(&header).map_err(err)?;
    for (key, fv) in rows {
        let mut record = vec![key.video_id.clone(), key.start_s().to_string(), key.end_s().to_string()];
        record.extend(fv.as_slice().iter().map(|v| v.to_string()));
        w.write_record(&record).map_err(err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn import_features<T: Scalar>(path: impl AsRef<Path>) -> Result<Vec<(SegmentKey, FeatureVector<T>)>> {
    let path = path.as_ref();
    let loc = |row: usize| format!("{}:{}", path.display(), row);
    let mut r = csv::Reader::from_path(path)
        .map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?;
    let header = r
        .headers()
        .map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?
        .clone();
    let expected: Vec<&str> = KEY_COLUMNS.iter().chain(FEATURE_NAMES.iter()).copied().collect();
    for name in &expected {
        if !header.iter().any(|h| h == *name) {
            return Err(Error::schema(loc(1), *name, "missing column"));
        }
    }
    if header.len() != expected.len() {
        return Err(Error::schema(
            loc(1),
            "header",
            format!("{} columns, expected {}", header.len(), expected.len()),
        ));
    }
    if let Some((got, want)) = header.iter().zip(&expected).find(|(g, w)| g != *w) {
        return Err(Error::schema(
            loc(1),
            want.to_string(),
            format!("column out of order (found {got:?})"),
        ));
    }

    let mut out = Vec::new();
    for (i, record) in r.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: row,
            message: e.to_string(),
        })?;
        let num = |col: usize| -> Result<f64> {
            record[col].trim().parse::<f64>().map_err(|_| {
                Error::schema(loc(row), expected[col], format!("{:?} is not a number", &record[col]))
            })
        };
        let key = SegmentKey::new(&record[0], num(1)?, num(2)?);
        let mut values = Vec::with_capacity(N_FEATURES);
        for (col, name) in expected.iter().enumerate().skip(KEY_COLUMNS.len()) {
            let v = num(col)?;
            if !v.is_finite() {
                return Err(Error::schema(loc(row), *name, "value is not finite"));
            }
            values.push(T::lit(v));
        }
        let fv = FeatureVector::from_values(values)
            .map_err(|e| Error::schema(loc(row), "features", e.to_string()))?;
        out.push((key, fv));
    }
    Ok(out)
}
