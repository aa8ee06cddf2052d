use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::Interval;

/// Rounds seconds to the millisecond grid used by every on-disk record.
pub fn round_ms(t: f64) -> f64 {
    let r = (t * 1000.0).round() / 1000.0;
    // normalise -0.0
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub(crate) fn ser_ms<S: Serializer>(t: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round_ms(*t))
}

pub(crate) fn ser_opt_ms<S: Serializer>(
    t: &Option<f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match t {
        Some(t) => s.serialize_some(&round_ms(*t)),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    Cs,
    En,
    Es,
    Fr,
    Hu,
    It,
    Pt,
}

impl Language {
    pub const ALL: [Language; 7] = [
        Language::Cs,
        Language::En,
        Language::Es,
        Language::Fr,
        Language::Hu,
        Language::It,
        Language::Pt,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Language::Cs => "cs",
            Language::En => "en",
            Language::Es => "es",
            Language::Fr => "fr",
            Language::Hu => "hu",
            Language::It => "it",
            Language::Pt => "pt",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Language {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Language::ALL
            .into_iter()
            .find(|l| l.code() == s)
            .ok_or_else(|| {
                Error::Validation(format!(
                    "unsupported language {s:?} (expected one of cs, en, es, fr, hu, it, pt)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VideoRecord {
    pub video_id: String,
    pub language: Language,
    pub channel: String,
    pub duration_s: f64,
    pub split: Split,
}

/// One ASR token on a video timeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Word {
    pub video_id: String,
    pub idx: usize,
    pub token: String,
    #[serde(serialize_with = "ser_ms")]
    pub start_s: f64,
    #[serde(serialize_with = "ser_ms")]
    pub end_s: f64,
}

impl Word {
    pub fn new(video_id: impl Into<String>, idx: usize, token: &str, start_s: f64, end_s: f64) -> Self {
        Self {
            video_id: video_id.into(),
            idx,
            token: token.trim().to_string(),
            start_s,
            end_s,
        }
    }

    pub fn duration(&self) -> f64 {
        self.end_s - self.start_s
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.start_s, self.end_s)
    }

    pub(crate) fn normalize(&mut self) {
        self.token = self.token.trim().to_string();
        self.start_s = round_ms(self.start_s);
        self.end_s = round_ms(self.end_s);
    }

    pub fn validate(&self) -> std::result::Result<(), (&'static str, String)> {
        if self.video_id.is_empty() {
            return Err(("video_id", "empty".into()));
        }
        if self.token.trim().is_empty() {
            return Err(("token", "empty after trimming".into()));
        }
        if !self.start_s.is_finite() || self.start_s < 0.0 {
            return Err(("start_s", format!("{} is not a non-negative time", self.start_s)));
        }
        if !self.end_s.is_finite() || self.end_s < self.start_s {
            return Err(("end_s", format!("{} precedes start_s {}", self.end_s, self.start_s)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaughterSource {
    Detector,
    AsrGap,
    Manual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaughterSegment {
    pub video_id: String,
    #[serde(serialize_with = "ser_ms")]
    pub start_s: f64,
    #[serde(serialize_with = "ser_ms")]
    pub end_s: f64,
    pub source: LaughterSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
}

impl LaughterSegment {
    pub fn new(video_id: impl Into<String>, start_s: f64, end_s: f64, source: LaughterSource) -> Self {
        Self {
            video_id: video_id.into(),
            start_s,
            end_s,
            source,
            score: None,
        }
    }

    pub fn with_score(mut self, score: f64) -> Self {
        self.score = Some(score);
        self
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.start_s, self.end_s)
    }

    pub fn duration(&self) -> f64 {
        self.end_s - self.start_s
    }

    pub(crate) fn normalize(&mut self) {
        self.start_s = round_ms(self.start_s);
        self.end_s = round_ms(self.end_s);
    }

    pub fn validate(&self) -> std::result::Result<(), (&'static str, String)> {
        if self.video_id.is_empty() {
            return Err(("video_id", "empty".into()));
        }
        if !self.start_s.is_finite() || self.start_s < 0.0 {
            return Err(("start_s", format!("{} is not a non-negative time", self.start_s)));
        }
        if !self.end_s.is_finite() || self.end_s <= self.start_s {
            return Err(("end_s", format!("{} does not exceed start_s {}", self.end_s, self.start_s)));
        }
        if let Some(s) = self.score {
            if !(0.0..=1.0).contains(&s) {
                return Err(("score", format!("{s} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Per-video word sequence with binary laugh labels; also the shape of
/// `predictions.jsonl`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledSequence {
    pub video_id: String,
    pub language: Language,
    pub tokens: Vec<String>,
    pub labels: Vec<u8>,
}

impl LabeledSequence {
    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l == 1).count()
    }

    pub fn validate(&self) -> std::result::Result<(), (&'static str, String)> {
        if self.video_id.is_empty() {
            return Err(("video_id", "empty".into()));
        }
        if self.tokens.len() != self.labels.len() {
            return Err((
                "labels",
                format!("{} labels for {} tokens", self.labels.len(), self.tokens.len()),
            ));
        }
        if let Some(bad) = self.labels.iter().find(|&&l| l > 1) {
            return Err(("labels", format!("label {bad} is not 0 or 1")));
        }
        if self.tokens.iter().any(|t| t.trim().is_empty()) {
            return Err(("tokens", "empty token".into()));
        }
        Ok(())
    }
}
