//! Word-level binary scores for sequence labels.

use std::collections::{BTreeMap, HashMap};

use super::metrics::Confusion;
use super::report::MetricReport;
use crate::corpus::LabeledSequence;
use crate::error::{Error, Result};

/// Positive-class scores per language and overall. Both files must hold the
/// same videos with the same tokens.
pub fn eval_tokens(pred: &[LabeledSequence], gold: &[LabeledSequence]) -> Result<MetricReport> {
    let pred_by: HashMap<&str, &LabeledSequence> = pred.iter().map(|s| (s.video_id.as_str(), s)).collect();
    if pred_by.len() != pred.len() {
        return Err(Error::Validation("duplicate video id in predictions".into()));
    }
    let gold_ids: std::collections::HashSet<&str> = gold.iter().map(|s| s.video_id.as_str()).collect();
    if let Some(extra) = pred.iter().find(|s| !gold_ids.contains(s.video_id.as_str())) {
        return Err(Error::Validation(format!(
            "video {} is predicted but absent from the gold file",
            extra.video_id
        )));
    }

    let mut pos = Confusion::default();
    let mut neg = Confusion::default();
    let mut by_lang: BTreeMap<String, Confusion> = BTreeMap::new();
    for g in gold {
        let p = pred_by.get(g.video_id.as_str()).ok_or_else(|| {
            Error::Validation(format!("video {} has no predictions", g.video_id))
        })?;
        if p.tokens != g.tokens {
            let at = p
                .tokens
                .iter()
                .zip(&g.tokens)
                .position(|(a, b)| a != b)
                .unwrap_or(p.tokens.len().min(g.tokens.len()));
            return Err(Error::Validation(format!(
                "tokens of video {} diverge at position {at}",
                g.video_id
            )));
        }
        if p.labels.len() != g.labels.len() {
            return Err(Error::Validation(format!(
                "video {} has {} predicted labels for {} tokens",
                g.video_id,
                p.labels.len(),
                g.tokens.len()
            )));
        }
        let mut c = Confusion::default();
        let mut cn = Confusion::default();
        for (&pl, &gl) in p.labels.iter().zip(&g.labels) {
            match (pl, gl) {
                (1, 1) => c.tp += 1,
                (1, _) => {
                    c.fp += 1;
                    cn.fn_ += 1;
                }
                (_, 1) => {
                    c.fn_ += 1;
                    cn.fp += 1;
                }
                _ => cn.tp += 1,
            }
        }
        pos.add(&c);
        neg.add(&cn);
        by_lang.entry(g.language.code().to_string()).or_default().add(&c);
    }
    Ok(MetricReport::tokens(pos, neg, by_lang))
}
