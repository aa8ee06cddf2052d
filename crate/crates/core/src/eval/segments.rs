//! Segment-level scoring by one-to-one IoU matching.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::metrics::Confusion;
use super::report::MetricReport;
use crate::corpus::{group_by_video, Language, LaughterSegment};
use crate::error::{Error, Result};
use crate::interval::{iou, Interval};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    /// A pair counts only when its IoU is strictly above this.
    pub iou_threshold: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { iou_threshold: 0.2 }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.iou_threshold > 0.0 && self.iou_threshold <= 1.0) {
            return Err(Error::Validation(format!(
                "iou threshold {} outside (0, 1]",
                self.iou_threshold
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Matching {
    /// `(pred index, gold index, iou)` in acceptance order.
    pub matched: Vec<(usize, usize, f64)>,
    pub unmatched_pred: Vec<usize>,
    pub unmatched_gold: Vec<usize>,
}

impl Matching {
    pub fn confusion(&self) -> Confusion {
        Confusion::new(self.matched.len(), self.unmatched_pred.len(), self.unmatched_gold.len())
    }
}

/// Greedy one-to-one matching in order of descending IoU. Ties go to the
/// earlier gold start, then the earlier prediction start.
pub fn match_segments<T: crate::num::Scalar>(
    pred: &[Interval<T>],
    gold: &[Interval<T>],
    cfg: &EvalConfig,
) -> Matching {
    let threshold = T::lit(cfg.iou_threshold);
    let mut pairs = Vec::new();
    for (p, pi) in pred.iter().enumerate() {
        for (g, gi) in gold.iter().enumerate() {
            let v = iou(pi, gi);
            if v > threshold {
                pairs.push((p, g, v));
            }
        }
    }
    pairs.sort_by(|a, b| {
        b.2.partial_cmp(&a.2)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(gold[a.1].start.partial_cmp(&gold[b.1].start).unwrap_or(std::cmp::Ordering::Equal))
            .then(pred[a.0].start.partial_cmp(&pred[b.0].start).unwrap_or(std::cmp::Ordering::Equal))
            .then(a.1.cmp(&b.1))
            .then(a.0.cmp(&b.0))
    });
    let mut pred_used = vec![false; pred.len()];
    let mut gold_used = vec![false; gold.len()];
    let mut out = Matching::default();
    for (p, g, v) in pairs {
        if !pred_used[p] && !gold_used[g] {
            pred_used[p] = true;
            gold_used[g] = true;
            out.matched.push((p, g, v.as_f64()));
        }
    }
    out.unmatched_pred = (0..pred.len()).filter(|&i| !pred_used[i]).collect();
    out.unmatched_gold = (0..gold.len()).filter(|&i| !gold_used[i]).collect();
    out
}

/// Micro-averaged detection scores over all videos. Videos are grouped by
/// `languages` when given, otherwise under `unknown`.
pub fn eval_segments(
    pred: &[LaughterSegment],
    gold: &[LaughterSegment],
    languages: Option<&HashMap<String, Language>>,
    cfg: &EvalConfig,
) -> Result<MetricReport> {
    cfg.validate()?;
    let pred_by = group_by_video(pred, |s| s.video_id.as_str());
    let gold_by = group_by_video(gold, |s| s.video_id.as_str());
    let mut ids: Vec<&str> = pred_by.keys().chain(gold_by.keys()).copied().collect();
    ids.sort_unstable();
    ids.dedup();

    let mut total = Confusion::default();
    let mut by_lang: BTreeMap<String, Confusion> = BTreeMap::new();
    for id in ids {
        let to_iv = |v: Option<&Vec<&LaughterSegment>>| -> Vec<Interval<f64>> {
            v.map(|v| v.iter().map(|s| s.interval()).collect()).unwrap_or_default()
        };
        let p = to_iv(pred_by.get(id));
        let g = to_iv(gold_by.get(id));
        let c = match_segments(&p, &g, cfg).confusion();
        total.add(&c);
        let lang = match languages {
            Some(m) => m
                .get(id)
                .map(|l| l.code().to_string())
                .ok_or_else(|| Error::Validation(format!("video {id} is missing from the manifest")))?,
            None => "unknown".to_string(),
        };
        by_lang.entry(lang).or_default().add(&c);
    }
    Ok(MetricReport::segments(cfg.iou_threshold, total, by_lang))
}
