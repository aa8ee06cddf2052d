//! Word-level laugh labels from laughter segments.

use serde::{Deserialize, Serialize};

use crate::corpus::{LaughterSegment, Word};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelScheme {
    /// Every word from the one at the laugh onset to the one at its offset
    /// is positive: the label means "laughing now or about to".
    #[default]
    Span,
    /// A word is positive when a laugh starts after it ends and no later
    /// than the end of the following word.
    NextWord,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct LabelingConfig {
    pub scheme: LabelScheme,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordLabels {
    pub labels: Vec<u8>,
    /// Laughs that could not be attached to any word.
    pub unattached_laughs: usize,
}

/// Boundary lookups over words sorted by start whose ends need not be sorted.
struct Boundaries {
    starts: Vec<f64>,
    /// Running maximum of `end_s`.
    prefix_max_end: Vec<f64>,
    /// Running minimum of `end_s` from the back.
    suffix_min_end: Vec<f64>,
}

impl Boundaries {
    fn new(words: &[Word]) -> Self {
        let starts = words.iter().map(|w| w.start_s).collect();
        let mut prefix_max_end = Vec::with_capacity(words.len());
        let mut acc = f64::NEG_INFINITY;
        for w in words {
            acc = acc.max(w.end_s);
            prefix_max_end.push(acc);
        }
        let mut suffix_min_end = vec![0.0; words.len()];
        let mut acc = f64::INFINITY;
        for (i, w) in words.iter().enumerate().rev() {
            acc = acc.min(w.end_s);
            suffix_min_end[i] = acc;
        }
        Self {
            starts,
            prefix_max_end,
            suffix_min_end,
        }
    }

    /// The first word whose closed interval contains `t`, else the last word
    /// ending strictly before `t`.
    fn word_at_or_before(&self, t: f64) -> Option<usize> {
        let started = self.starts.partition_point(|&s| s <= t);
        let first_reaching = self.prefix_max_end.partition_point(|&e| e < t);
        if first_reaching < started {
            return Some(first_reaching);
        }
        let ended = self.suffix_min_end.partition_point(|&e| e < t);
        ended.checked_sub(1)
    }
}

pub fn label_words(words: &[Word], laughs: &[LaughterSegment], cfg: &LabelingConfig) -> WordLabels {
    label_words_until(words, laughs, cfg, f64::INFINITY)
}

/// Like [`label_words`]; `video_end` closes the window of the last word in
/// the next-word scheme.
pub fn label_words_until(
    words: &[Word],
    laughs: &[LaughterSegment],
    cfg: &LabelingConfig,
    video_end: f64,
) -> WordLabels {
    match cfg.scheme {
        LabelScheme::Span => span_labels(words, laughs),
        LabelScheme::NextWord => next_word_labels(words, laughs, video_end),
    }
}

fn span_labels(words: &[Word], laughs: &[LaughterSegment]) -> WordLabels {
    let mut out = WordLabels {
        labels: vec![0; words.len()],
        unattached_laughs: 0,
    };
    if words.is_empty() {
        out.unattached_laughs = laughs.len();
        return out;
    }
    let b = Boundaries::new(words);
    for laugh in laughs {
        let Some(last) = b.word_at_or_before(laugh.end_s) else {
            // the whole laugh precedes the first word
            out.unattached_laughs += 1;
            continue;
        };
        let first = b.word_at_or_before(laugh.start_s).unwrap_or(0);
        let (lo, hi) = (first.min(last), first.max(last));
        out.labels[lo..=hi].fill(1);
    }
    out
}

fn next_word_labels(words: &[Word], laughs: &[LaughterSegment], video_end: f64) -> WordLabels {
    let mut onsets: Vec<f64> = laughs.iter().map(|l| l.start_s).collect();
    onsets.sort_by(f64::total_cmp);
    // laughs starting in (lo, hi]
    let count_in = |lo: f64, hi: f64| {
        if hi <= lo {
            return 0;
        }
        onsets.partition_point(|&s| s <= hi) - onsets.partition_point(|&s| s <= lo)
    };
    let n = words.len();
    let mut attached = vec![false; onsets.len()];
    let labels = (0..n)
        .map(|i| {
            let lo = words[i].end_s;
            let hi = if i + 1 < n { words[i + 1].end_s } else { video_end };
            let k = count_in(lo, hi);
            if k > 0 {
                let from = onsets.partition_point(|&s| s <= lo);
                attached[from..from + k].fill(true);
            }
            u8::from(k > 0)
        })
        .collect();
    WordLabels {
        labels,
        unattached_laughs: attached.iter().filter(|&&a| !a).count(),
    }
}
