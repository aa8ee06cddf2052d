use serde::{Deserialize, Serialize};

use crate::corpus::Word;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlignConfig {
    /// Absolute duration floor for an anomalous word, seconds.
    pub abs_dur_s: f64,
    /// Multiple of the median duration of the other words in the video.
    pub rel_factor: f64,
    pub min_candidate_dur: f64,
    /// A candidate is dropped once an existing laughter covers this fraction of it.
    pub max_existing_overlap: f64,
}

impl Default for AlignConfig {
    fn default() -> Self {
        Self {
            abs_dur_s: 0.8,
            rel_factor: 3.0,
            min_candidate_dur: 0.5,
            max_existing_overlap: 0.5,
        }
    }
}

/// Indices of words longer than `max(abs_dur_s, rel_factor × median)`.
///
/// The median is taken over the *other* words of the transcript, so a single
/// stretched word cannot inflate its own threshold. A one-word transcript has
/// no reference population and only the absolute floor applies.
pub fn find_anomalous_words(words: &[Word], cfg: &AlignConfig) -> Vec<usize> {
    let n = words.len();
    if n == 0 {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| words[x].duration().total_cmp(&words[y].duration()));
    let sorted: Vec<f64> = order.iter().map(|&i| words[i].duration()).collect();
    let mut rank = vec![0; n];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }

    (0..n)
        .filter(|&i| {
            let threshold = match median_without(&sorted, rank[i]) {
                Some(med) => cfg.abs_dur_s.max(cfg.rel_factor * med),
                None => cfg.abs_dur_s,
            };
            words[i].duration() > threshold
        })
        .collect()
}

/// Median of `sorted` with the element at `skip` removed.
fn median_without(sorted: &[f64], skip: usize) -> Option<f64> {
    let m = sorted.len() - 1;
    if m == 0 {
        return None;
    }
    let get = |k: usize| if k < skip { sorted[k] } else { sorted[k + 1] };
    Some(if m % 2 == 1 {
        get(m / 2)
    } else {
        (get(m / 2 - 1) + get(m / 2)) / 2.0
    })
}
