//! Per-video labeling and dataset assembly.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scheme::{label_words_until, LabelingConfig};
use crate::corpus::{group_by_video, LabeledSequence, Language, LaughterSegment, VideoRecord, Word};
use crate::error::{Error, Result};

/// One row of `labels.jsonl`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordLabel {
    pub video_id: String,
    pub idx: usize,
    pub label: u8,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LabelCounts {
    pub videos: usize,
    pub words: usize,
    pub positives: usize,
}

impl LabelCounts {
    pub fn positive_rate(&self) -> f64 {
        if self.words == 0 {
            0.0
        } else {
            self.positives as f64 / self.words as f64
        }
    }

    fn add(&mut self, words: usize, positives: usize) {
        self.videos += 1;
        self.words += words;
        self.positives += positives;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LabelReport {
    pub config: LabelingConfig,
    pub languages: BTreeMap<Language, LabelCounts>,
    pub total: LabelCounts,
    /// Videos in the manifest without any words.
    pub skipped_videos: Vec<String>,
    pub unattached_laughs: usize,
    /// Laughs dropped because nothing was left after clipping to the video.
    pub out_of_bounds_laughs: usize,
}

impl LabelReport {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<8} {:>7} {:>10} {:>10} {:>7}", "lang", "videos", "words", "positive", "rate");
        let mut row = |name: &str, c: &LabelCounts| {
            let _ = writeln!(
                out,
                "{:<8} {:>7} {:>10} {:>10} {:>6.1}%",
                name,
                c.videos,
                c.words,
                c.positives,
                100.0 * c.positive_rate()
            );
        };
        for (lang, c) in &self.languages {
            row(lang.code(), c);
        }
        row("total", &self.total);
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmitOutput {
    pub sequences: Vec<LabeledSequence>,
    pub report: LabelReport,
}

/// Restricts laughs to `[0, duration]`, dropping any that vanish.
fn clip_laughs(laughs: &[&LaughterSegment], duration: f64) -> (Vec<LaughterSegment>, usize) {
    let mut dropped = 0;
    let mut kept: Vec<LaughterSegment> = laughs
        .iter()
        .filter_map(|l| {
            let mut l = (*l).clone();
            l.start_s = l.start_s.max(0.0);
            l.end_s = l.end_s.min(duration);
            if l.end_s > l.start_s {
                Some(l)
            } else {
                dropped += 1;
                None
            }
        })
        .collect();
    kept.sort_by(|a, b| a.start_s.total_cmp(&b.start_s).then(a.end_s.total_cmp(&b.end_s)));
    (kept, dropped)
}

struct VideoLabels {
    labels: Vec<u8>,
    unattached: usize,
    out_of_bounds: usize,
}

fn label_video(
    video: &VideoRecord,
    words: &[&Word],
    laughs: &[&LaughterSegment],
    cfg: &LabelingConfig,
) -> VideoLabels {
    let (laughs, out_of_bounds) = clip_laughs(laughs, video.duration_s);
    let words: Vec<Word> = words.iter().map(|w| (*w).clone()).collect();
    let l = label_words_until(&words, &laughs, cfg, video.duration_s);
    VideoLabels {
        labels: l.labels,
        unattached: l.unattached_laughs,
        out_of_bounds,
    }
}

/// Word labels for the whole corpus in manifest order.
pub fn label_corpus(
    manifest: &[VideoRecord],
    words: &[Word],
    laughter: &[LaughterSegment],
    cfg: &LabelingConfig,
) -> (Vec<WordLabel>, LabelReport) {
    let (seqs, report) = run(manifest, words, laughter, cfg);
    let rows = seqs
        .into_iter()
        .flat_map(|(video, ws, labels)| {
            ws.into_iter().zip(labels).map(move |(w, label)| WordLabel {
                video_id: video.video_id.clone(),
                idx: w.idx,
                label,
            })
        })
        .collect();
    (rows, report)
}

type Labeled<'a> = (&'a VideoRecord, Vec<&'a Word>, Vec<u8>);

fn run<'a>(
    manifest: &'a [VideoRecord],
    words: &'a [Word],
    laughter: &'a [LaughterSegment],
    cfg: &LabelingConfig,
) -> (Vec<Labeled<'a>>, LabelReport) {
    let words_by = group_by_video(words, |w| w.video_id.as_str());
    let laughs_by = group_by_video(laughter, |l| l.video_id.as_str());
    let results: Vec<Option<(Labeled<'a>, usize, usize)>> = manifest
        .par_iter()
        .map(|v| {
            let ws = words_by.get(v.video_id.as_str())?;
            let ls = laughs_by.get(v.video_id.as_str()).map(Vec::as_slice).unwrap_or(&[]);
            let out = label_video(v, ws, ls, cfg);
            Some(((v, ws.clone(), out.labels), out.unattached, out.out_of_bounds))
        })
        .collect();

    let mut report = LabelReport {
        config: cfg.clone(),
        ..Default::default()
    };
    let mut seqs = Vec::new();
    for (v, r) in manifest.iter().zip(results) {
        match r {
            None => {
                log::warn!("video {} has no words; skipped", v.video_id);
                report.skipped_videos.push(v.video_id.clone());
            }
            Some((labeled, unattached, oob)) => {
                let pos = labeled.2.iter().filter(|&&l| l == 1).count();
                report.languages.entry(v.language).or_default().add(labeled.1.len(), pos);
                report.total.add(labeled.1.len(), pos);
                report.unattached_laughs += unattached;
                report.out_of_bounds_laughs += oob;
                seqs.push(labeled);
            }
        }
    }
    if report.unattached_laughs > 0 {
        log::warn!("{} laughs precede every word and label nothing", report.unattached_laughs);
    }
    (seqs, report)
}

/// One labeled sequence per video with words, in manifest order.
pub fn emit_dataset(
    manifest: &[VideoRecord],
    words: &[Word],
    laughter: &[LaughterSegment],
    cfg: &LabelingConfig,
) -> EmitOutput {
    let (seqs, report) = run(manifest, words, laughter, cfg);
    let sequences = seqs
        .into_iter()
        .map(|(v, ws, labels)| LabeledSequence {
            video_id: v.video_id.clone(),
            language: v.language,
            tokens: ws.iter().map(|w| w.token.clone()).collect(),
            labels,
        })
        .collect();
    EmitOutput { sequences, report }
}

/// Builds the dataset from precomputed word labels; every word must have
/// exactly one label.
pub fn assemble_dataset(
    manifest: &[VideoRecord],
    words: &[Word],
    labels: &[WordLabel],
    cfg: &LabelingConfig,
) -> Result<EmitOutput> {
    let mut by_key: HashMap<(&str, usize), u8> = HashMap::with_capacity(labels.len());
    for l in labels {
        if by_key.insert((l.video_id.as_str(), l.idx), l.label).is_some() {
            return Err(Error::Validation(format!(
                "duplicate label for word {} of video {}",
                l.idx, l.video_id
            )));
        }
        if l.label > 1 {
            return Err(Error::Validation(format!(
                "label {} for word {} of video {} is not 0 or 1",
                l.label, l.idx, l.video_id
            )));
        }
    }
    let known: HashSet<(&str, usize)> = words.iter().map(|w| (w.video_id.as_str(), w.idx)).collect();
    if let Some(l) = labels
        .iter()
        .find(|l| !known.contains(&(l.video_id.as_str(), l.idx)))
    {
        return Err(Error::Validation(format!(
            "label for unknown word {} of video {}",
            l.idx, l.video_id
        )));
    }
    let words_by = group_by_video(words, |w| w.video_id.as_str());
    let mut out = EmitOutput {
        sequences: Vec::new(),
        report: LabelReport {
            config: cfg.clone(),
            ..Default::default()
        },
    };
    for v in manifest {
        let Some(ws) = words_by.get(v.video_id.as_str()) else {
            log::warn!("video {} has no words; skipped", v.video_id);
            out.report.skipped_videos.push(v.video_id.clone());
            continue;
        };
        let labels = ws
            .iter()
            .map(|w| {
                by_key.get(&(w.video_id.as_str(), w.idx)).copied().ok_or_else(|| {
                    Error::Validation(format!("word {} of video {} has no label", w.idx, w.video_id))
                })
            })
            .collect::<Result<Vec<u8>>>()?;
        let pos = labels.iter().filter(|&&l| l == 1).count();
        out.report.languages.entry(v.language).or_default().add(ws.len(), pos);
        out.report.total.add(ws.len(), pos);
        out.sequences.push(LabeledSequence {
            video_id: v.video_id.clone(),
            language: v.language,
            tokens: ws.iter().map(|w| w.token.clone()).collect(),
            labels,
        });
    }
    Ok(out)
}

/// Sidecar written next to `dataset.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub scheme: super::LabelScheme,
    pub config_digest: String,
    /// Input role (`manifest`, `words`, `labels` or `laughter`) to the
    /// sha256 hex digest of that file.
    pub inputs: BTreeMap<String, String>,
    pub counts: LabelCounts,
}
