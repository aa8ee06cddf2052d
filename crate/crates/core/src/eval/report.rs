use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::metrics::{ClassScores, Confusion, MacroScores};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    Segments,
    Tokens,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub kind: ReportKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iou_threshold: Option<f64>,
    /// How counts are pooled within a row.
    pub averaging: String,
    pub positive: ClassScores,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negative: Option<ClassScores>,
    #[serde(rename = "macro", default, skip_serializing_if = "Option::is_none")]
    pub macro_avg: Option<MacroScores>,
    pub by_language: BTreeMap<String, ClassScores>,
    /// Unweighted mean of the per-language positive F1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language_mean_f1: Option<f64>,
}

impl MetricReport {
    pub(crate) fn segments(threshold: f64, total: Confusion, by_lang: BTreeMap<String, Confusion>) -> Self {
        Self {
            kind: ReportKind::Segments,
            iou_threshold: Some(threshold),
            averaging: "micro".into(),
            positive: total.scores(),
            negative: None,
            macro_avg: None,
            by_language: by_lang.into_iter().map(|(k, c)| (k, c.scores())).collect(),
            language_mean_f1: None,
        }
    }

    pub(crate) fn tokens(pos: Confusion, neg: Confusion, by_lang: BTreeMap<String, Confusion>) -> Self {
        let by_language: BTreeMap<String, ClassScores> =
            by_lang.into_iter().map(|(k, c)| (k, c.scores())).collect();
        let language_mean_f1 = (!by_language.is_empty())
            .then(|| by_language.values().map(|s| s.f1).sum::<f64>() / by_language.len() as f64);
        let positive = pos.scores();
        let negative = neg.scores();
        Self {
            kind: ReportKind::Tokens,
            iou_threshold: None,
            averaging: "micro".into(),
            positive,
            negative: Some(negative),
            macro_avg: Some(MacroScores::of(&[positive, negative])),
            by_language,
            language_mean_f1,
        }
    }

    pub fn to_table(&self, by_language: bool) -> String {
        let mut out = String::new();
        if let Some(t) = self.iou_threshold {
            let _ = writeln!(out, "iou > {t}");
        }
        let _ = writeln!(
            out,
            "{:<10} {:>9} {:>9} {:>9} {:>7} {:>7} {:>7}",
            "row", "precision", "recall", "f1", "tp", "fp", "fn"
        );
        let mut row = |name: &str, s: &ClassScores| {
            let _ = writeln!(
                out,
                "{:<10} {:>9.4} {:>9.4} {:>9.4} {:>7} {:>7} {:>7}",
                name, s.precision, s.recall, s.f1, s.counts.tp, s.counts.fp, s.counts.fn_
            );
        };
        if by_language {
            for (lang, s) in &self.by_language {
                row(lang, s);
            }
        }
        row("laughter", &self.positive);
        if let Some(n) = &self.negative {
            row("other", n);
        }
        if let Some(m) = &self.macro_avg {
            let _ = writeln!(
                out,
                "{:<10} {:>9.4} {:>9.4} {:>9.4}",
                "macro", m.precision, m.recall, m.f1
            );
        }
        if by_language {
            if let Some(avg) = self.language_mean_f1 {
                let _ = writeln!(out, "{:<10} {:>9} {:>9} {:>9.4}", "lang avg", "", "", avg);
            }
        }
        out
    }
}
