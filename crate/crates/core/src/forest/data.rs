//! Joining `features.csv` rows with segment labels into training examples.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::verify::{verify, Verification};
use super::Class;
use crate::error::{Error, Result};
use crate::features::{FeatureVector, SegmentKey, FEATURE_NAMES};
use crate::num::Scalar;

#[derive(Debug, Deserialize, Serialize)]
struct LabelRow {
    video_id: String,
    start_s: f64,
    end_s: f64,
    label: Class,
}

/// Reads `labels.csv` (`video_id,start_s,end_s,label` with label
/// `laughter` or `other`).
pub fn read_labels(path: impl AsRef<Path>) -> Result<HashMap<SegmentKey, Class>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path)
        .map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?;
    let mut out = HashMap::new();
    for (i, row) in r.deserialize::<LabelRow>().enumerate() {
        let row = row.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 2,
            message: e.to_string(),
        })?;
        let key = SegmentKey::new(row.video_id, row.start_s, row.end_s);
        if out.insert(key.clone(), row.label).is_some() {
            return Err(Error::Validation(format!(
                "{}:{}: duplicate segment {key:?}",
                path.display(),
                i + 2
            )));
        }
    }
    Ok(out)
}

pub fn write_labels(path: impl AsRef<Path>, labels: &[(SegmentKey, Class)]) -> Result<()> {
    let path = path.as_ref();
    let err = |e: csv::Error| Error::Validation(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    for (key, label) in labels {
        w.serialize(LabelRow {
            video_id: key.video_id.clone(),
            start_s: key.start_s(),
            end_s: key.end_s(),
            label: *label,
        })
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Labelled examples that passed the duration gate.
#[derive(Debug, Clone, Default)]
pub struct TrainingSet<T> {
    pub keys: Vec<SegmentKey>,
    pub x: Vec<Vec<T>>,
    pub y: Vec<Class>,
    /// Segments removed by the verification stage.
    pub auto_other: Vec<SegmentKey>,
    /// Labelled segments with no feature row.
    pub missing_features: Vec<SegmentKey>,
}

impl<T: Scalar> TrainingSet<T> {
    pub fn feature_order() -> Vec<String> {
        FEATURE_NAMES.iter().map(|s| s.to_string()).collect()
    }
}

/// Pairs labelled segments with their feature rows in feature-file order,
/// dropping segments shorter than the verification threshold.
pub fn gate_examples<T: Scalar>(
    features: &[(SegmentKey, FeatureVector<T>)],
    labels: &HashMap<SegmentKey, Class>,
) -> TrainingSet<T> {
    let mut set = TrainingSet {
        keys: Vec::new(),
        x: Vec::new(),
        y: Vec::new(),
        auto_other: Vec::new(),
        missing_features: Vec::new(),
    };
    let mut seen = std::collections::HashSet::new();
    for (key, fv) in features {
        let Some(&label) = labels.get(key) else { continue };
        seen.insert(key);
        if verify(key.end_s() - key.start_s()) == Verification::AutoOther {
            set.auto_other.push(key.clone());
            continue;
        }
        set.keys.push(key.clone());
        set.x.push(fv.as_slice().to_vec());
        set.y.push(label);
    }
    let mut missing: Vec<SegmentKey> = labels.keys().filter(|k| !seen.contains(k)).cloned().collect();
    missing.sort();
    set.missing_features = missing;
    set
}
