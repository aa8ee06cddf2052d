//! Laughter candidates from dual-transcript timestamp discrepancies.
//!
//! Around an audience laugh, system A stretches the word *before* the laugh
//! and system B stretches the word *after* it:
//!
//! ```text
//!          word1              [laugh]          word2
//! A:   |a0 ------------------------------ a1| |a0' a1'|
//! B:   |b0 b1|  |b0' ------------------------------ b1'|
//! out: |b0 b1|  |b0' ........ laugh ...... a1| |a0' a1'|
//! ```
//!
//! The overlap of the two stretched words is the laugh; word1 takes its
//! B timing and word2 keeps its A timing.

use serde::{Deserialize, Serialize};

use super::anomaly::{find_anomalous_words, AlignConfig};
use super::tokens::{align_tokens, AlignedPair};
use crate::corpus::{round_ms, ser_ms, ser_opt_ms, LaughterSegment, Word};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DualTranscript {
    pub video_id: String,
    /// Transcript that attaches laughter to the previous word.
    pub words_a: Vec<Word>,
    /// Transcript that attaches laughter to the next word.
    pub words_b: Vec<Word>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateLaughter {
    pub video_id: String,
    #[serde(serialize_with = "ser_ms")]
    pub start_s: f64,
    #[serde(serialize_with = "ser_ms")]
    pub end_s: f64,
    /// `idx` of the word preceding the laugh.
    pub prev_word_idx: usize,
    /// `idx` of the word following the laugh, absent at the end of a transcript.
    pub next_word_idx: Option<usize>,
    #[serde(serialize_with = "ser_ms")]
    pub corrected_prev_end_s: f64,
    #[serde(serialize_with = "ser_opt_ms")]
    pub corrected_next_start_s: Option<f64>,
}

impl CandidateLaughter {
    pub fn duration(&self) -> f64 {
        self.end_s - self.start_s
    }
}

/// Output of [`extract_candidates`] for one video.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Extraction {
    pub candidates: Vec<CandidateLaughter>,
    pub corrected_words: Vec<Word>,
    pub anomalies_a: usize,
    pub anomalies_b: usize,
    /// Intersecting anomalous pairs found, including ones not emitted.
    pub discrepancies: usize,
}

fn check_sorted(words: &[Word], video_id: &str, which: &str) -> Result<()> {
    for (i, w) in words.iter().enumerate() {
        if w.video_id != video_id {
            return Err(Error::Validation(format!(
                "transcript {which} of video {video_id} contains a word of video {}",
                w.video_id
            )));
        }
        w.validate().map_err(|(f, m)| {
            Error::Validation(format!("transcript {which} of video {video_id}, word {i}: {f}: {m}"))
        })?;
        if i > 0 && w.start_s < words[i - 1].start_s {
            return Err(Error::Validation(format!(
                "transcript {which} of video {video_id} is not sorted by start_s at word {i}"
            )));
        }
    }
    Ok(())
}

/// For every A position, the B index to start searching from: one past the
/// last B word aligned at or before it.
fn search_starts(pairs: &[AlignedPair], n_a: usize) -> (Vec<usize>, Vec<Option<usize>>) {
    let mut start = vec![0; n_a];
    let mut counterpart = vec![None; n_a];
    let mut next_b = 0;
    for p in pairs {
        if let Some(j) = p.b_idx {
            next_b = j + 1;
        }
        if let Some(i) = p.a_idx {
            start[i] = next_b;
            counterpart[i] = p.b_idx;
        }
    }
    (start, counterpart)
}

/// Upper bound on repair passes; real transcripts settle in two or three.
const MAX_PASSES: usize = 32;

/// Repairs transcript A against B and collects the laughter their
/// disagreements reveal. A repair lowers the median word duration, which can
/// expose further anomalous words, so passes repeat on the repaired words,
/// with earlier candidates counted as known laughter, until one changes
/// nothing.
pub fn extract_candidates(
    dual: &DualTranscript,
    existing: &[LaughterSegment],
    cfg: &AlignConfig,
) -> Result<Extraction> {
    check_sorted(&dual.words_a, &dual.video_id, "A")?;
    check_sorted(&dual.words_b, &dual.video_id, "B")?;
    let mut known: Vec<crate::Interval> = existing
        .iter()
        .filter(|l| l.video_id == dual.video_id)
        .map(LaughterSegment::interval)
        .collect();

    let mut words = dual.words_a.clone();
    let mut out = Extraction::default();
    let mut emitted: Vec<crate::Interval> = Vec::new();
    for pass in 0..MAX_PASSES {
        let ex = extract_pass(&words, &dual.words_b, &dual.video_id, &known, &emitted, cfg);
        if pass == 0 {
            out.anomalies_a = ex.anomalies_a;
            out.anomalies_b = ex.anomalies_b;
        }
        out.discrepancies += ex.discrepancies;
        let found = ex.candidates.iter().map(|c| crate::Interval::new(c.start_s, c.end_s));
        known.extend(found.clone());
        emitted.extend(found);
        out.candidates.extend(ex.candidates);
        let settled = ex.corrected_words == words;
        words = ex.corrected_words;
        if settled {
            break;
        }
    }
    out.candidates.sort_by(|x, y| x.start_s.total_cmp(&y.start_s));
    out.corrected_words = words;
    Ok(out)
}

fn extract_pass(
    a: &[Word],
    b: &[Word],
    video_id: &str,
    existing: &[crate::Interval],
    emitted: &[crate::Interval],
    cfg: &AlignConfig,
) -> Extraction {
    let anomalous_a = find_anomalous_words(a, cfg);
    let mut is_anomalous_b = vec![false; b.len()];
    let anomalous_b = find_anomalous_words(b, cfg);
    for &k in &anomalous_b {
        is_anomalous_b[k] = true;
    }

    let pairs = align_tokens(a, b);
    let (search_from, counterpart) = search_starts(&pairs, a.len());

    let mut corrected = a.to_vec();
    let mut candidates = Vec::new();
    let mut discrepancies = 0;
    // end of the laugh found after word i-1, if any
    let mut laugh_before: Option<(usize, f64)> = None;

    for &i in &anomalous_a {
        let word = a[i].interval();
        let hit = (search_from[i]..b.len())
            .take_while(|&k| b[k].start_s < word.end)
            .find_map(|k| {
                if !is_anomalous_b[k] {
                    return None;
                }
                word.intersection(&b[k].interval())
            });
        let Some(laugh) = hit else { continue };
        let laugh = crate::Interval::new(round_ms(laugh.start), round_ms(laugh.end));
        discrepancies += 1;

        // Previous word: B timing, kept sorted and clear of the laugh.
        let mut lower = if i > 0 { corrected[i - 1].start_s } else { 0.0 };
        if let Some((j, end)) = laugh_before {
            if j + 1 == i {
                lower = lower.max(end);
            }
        }
        // nor may it reach back into a candidate from an earlier pass
        for e in emitted.iter().filter(|e| e.end <= laugh.start) {
            lower = lower.max(e.end);
        }
        let (prev_start, prev_end) = match counterpart[i].map(|j| &b[j]) {
            Some(bw) if bw.start_s >= lower && bw.start_s <= bw.end_s.min(laugh.start) => {
                (bw.start_s, bw.end_s.min(laugh.start))
            }
            _ => (corrected[i].start_s.max(lower).min(laugh.start), laugh.start),
        };
        corrected[i].start_s = prev_start;
        corrected[i].end_s = prev_end;

        // Next word: A timing, pushed past the laugh if A overlapped it.
        let next = corrected.get_mut(i + 1).map(|w| {
            w.start_s = w.start_s.max(laugh.end);
            w.end_s = w.end_s.max(w.start_s);
            (w.idx, w.start_s)
        });
        laugh_before = Some((i, laugh.end));

        let len = laugh.end - laugh.start;
        if len + 1e-9 < cfg.min_candidate_dur {
            continue;
        }
        let covered = existing
            .iter()
            .any(|e| e.overlap(&laugh) >= cfg.max_existing_overlap * len);
        if covered {
            continue;
        }
        candidates.push(CandidateLaughter {
            video_id: video_id.to_string(),
            start_s: laugh.start,
            end_s: laugh.end,
            prev_word_idx: a[i].idx,
            next_word_idx: next.map(|(idx, _)| idx),
            corrected_prev_end_s: prev_end,
            corrected_next_start_s: next.map(|(_, s)| s),
        });
    }

    Extraction {
        candidates,
        corrected_words: corrected,
        anomalies_a: anomalous_a.len(),
        anomalies_b: anomalous_b.len(),
        discrepancies,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::LaughterSource;

    fn w(idx: usize, tok: &str, s: f64, e: f64) -> Word {
        Word::new("v", idx, tok, s, e)
    }

    fn table_pattern() -> DualTranscript {
        DualTranscript {
            video_id: "v".into(),
            words_a: vec![w(0, "word1", 0.0, 3.0), w(1, "word2", 3.0, 3.4)],
            words_b: vec![w(0, "word1", 0.0, 0.4), w(1, "word2", 0.5, 3.4)],
        }
    }

    #[test]
    fn table_pattern_yields_intersection() {
        let out = extract_candidates(&table_pattern(), &[], &AlignConfig::default()).unwrap();
        assert_eq!(out.candidates.len(), 1);
        let c = &out.candidates[0];
        assert_eq!((c.start_s, c.end_s), (0.5, 3.0));
        assert_eq!((c.prev_word_idx, c.next_word_idx), (0, Some(1)));
        assert_eq!(c.corrected_prev_end_s, 0.4);
        assert_eq!(c.corrected_next_start_s, Some(3.0));
        let cw = &out.corrected_words;
        assert_eq!((cw[0].start_s, cw[0].end_s), (0.0, 0.4));
        assert_eq!((cw[1].start_s, cw[1].end_s), (3.0, 3.4));
    }

    #[test]
    fn identical_transcripts_unchanged() {
        let words: Vec<_> = (0..10)
            .map(|i| w(i, "tok", i as f64 * 0.4, i as f64 * 0.4 + 0.3))
            .collect();
        let dual = DualTranscript {
            video_id: "v".into(),
            words_a: words.clone(),
            words_b: words.clone(),
        };
        let out = extract_candidates(&dual, &[], &AlignConfig::default()).unwrap();
        assert!(out.candidates.is_empty());
        assert_eq!(out.corrected_words, words);
    }

    #[test]
    fn covered_by_existing_detection() {
        let existing = vec![LaughterSegment::new("v", 0.5, 3.0, LaughterSource::Detector)];
        let out = extract_candidates(&table_pattern(), &existing, &AlignConfig::default()).unwrap();
        assert!(out.candidates.is_empty());
        assert_eq!(out.discrepancies, 1);
        // timestamps are still repaired
        assert_eq!(out.corrected_words[0].end_s, 0.4);
    }

    #[test]
    fn existing_laughter_in_other_video_is_ignored() {
        let existing = vec![LaughterSegment::new("other", 0.5, 3.0, LaughterSource::Detector)];
        let out = extract_candidates(&table_pattern(), &existing, &AlignConfig::default()).unwrap();
        assert_eq!(out.candidates.len(), 1);
    }

    #[test]
    fn short_intersection_is_not_emitted() {
        let dual = DualTranscript {
            video_id: "v".into(),
            words_a: vec![w(0, "a", 0.0, 1.5), w(1, "b", 1.5, 1.8)],
            words_b: vec![w(0, "a", 0.0, 0.3), w(1, "b", 1.2, 2.5)],
        };
        let out = extract_candidates(&dual, &[], &AlignConfig::default()).unwrap();
        assert_eq!(out.discrepancies, 1);
        assert!(out.candidates.is_empty());
    }

    #[test]
    fn insertion_inside_region() {
        // B inserts a filler between the two words; the stretched B word is
        // the one after the filler.
        let dual = DualTranscript {
            video_id: "v".into(),
            words_a: vec![
                w(0, "so", 0.0, 0.3),
                w(1, "yeah", 0.4, 3.5),
                w(2, "anyway", 3.5, 3.9),
                w(3, "right", 4.0, 4.3),
            ],
            words_b: vec![
                w(0, "so", 0.0, 0.3),
                w(1, "yeah", 0.4, 0.7),
                w(2, "uh", 0.8, 1.0),
                w(3, "anyway", 1.2, 3.9),
                w(4, "right", 4.0, 4.3),
            ],
        };
        let out = extract_candidates(&dual, &[], &AlignConfig::default()).unwrap();
        assert_eq!(out.candidates.len(), 1);
        assert_eq!((out.candidates[0].start_s, out.candidates[0].end_s), (1.2, 3.5));
        assert_eq!(out.corrected_words[1].end_s, 0.7);
    }

    #[test]
    fn unsorted_input_rejected() {
        let mut dual = table_pattern();
        dual.words_b.swap(0, 1);
        assert!(matches!(
            extract_candidates(&dual, &[], &AlignConfig::default()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn candidate_serialization() {
        let out = extract_candidates(&table_pattern(), &[], &AlignConfig::default()).unwrap();
        let s = serde_json::to_string(&out.candidates[0]).unwrap();
        assert_eq!(
            s,
            r#"{"video_id":"v","start_s":0.5,"end_s":3.0,"prev_word_idx":0,"next_word_idx":1,"corrected_prev_end_s":0.4,"corrected_next_start_s":3.0}"#
        );
    }
}
