use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::model::ForestModel;
use super::verify::{verify, Verification};
use super::Class;
use crate::align::CandidateLaughter;
use crate::corpus::{LaughterSegment, LaughterSource};
use crate::error::{Error, Result};
use crate::features::{FeatureVector, SegmentKey};
use crate::num::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    AutoOther,
    Rejected,
    Accepted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateDecision {
    pub key: SegmentKey,
    pub verdict: Verdict,
    pub probability: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FilterOutcome {
    /// Accepted candidates as `asr_gap` laughter scored with the forest's
    /// probability.
    pub accepted: Vec<LaughterSegment>,
    pub decisions: Vec<CandidateDecision>,
}

impl FilterOutcome {
    pub fn count(&self, verdict: Verdict) -> usize {
        self.decisions.iter().filter(|d| d.verdict == verdict).count()
    }
}

/// Duration gate, then the forest. Candidates that pass the gate must have a
/// feature row.
pub fn filter_candidates<T: Scalar>(
    candidates: &[CandidateLaughter],
    features: &HashMap<SegmentKey, FeatureVector<T>>,
    model: &ForestModel<T>,
) -> Result<FilterOutcome> {
    let mut out = FilterOutcome::default();
    for c in candidates {
        let key = SegmentKey::new(&c.video_id, c.start_s, c.end_s);
        if verify(c.duration()) == Verification::AutoOther {
            out.decisions.push(CandidateDecision {
                key,
                verdict: Verdict::AutoOther,
                probability: None,
            });
            continue;
        }
        let fv = features.get(&key).ok_or_else(|| {
            Error::Validation(format!(
                "no features for candidate {} [{}, {}]",
                c.video_id, c.start_s, c.end_s
            ))
        })?;
        let (label, p) = model.predict(fv.as_slice())?;
        let verdict = if label == Class::Laughter {
            out.accepted.push(
                LaughterSegment::new(&c.video_id, c.start_s, c.end_s, LaughterSource::AsrGap)
                    .with_score((p * 1e6).round() / 1e6),
            );
            Verdict::Accepted
        } else {
            Verdict::Rejected
        };
        out.decisions.push(CandidateDecision {
            key,
            verdict,
            probability: Some(p),
        });
    }
    Ok(out)
}
