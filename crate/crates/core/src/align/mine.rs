//! Batch candidate mining over a corpus.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::anomaly::AlignConfig;
use super::candidates::{extract_candidates, CandidateLaughter, DualTranscript};
use crate::corpus::{group_by_video, validate_references, LaughterSegment, VideoRecord, Word};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MineStatus {
    Ok,
    MissingTranscriptA,
    MissingTranscriptB,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoMineStats {
    pub video_id: String,
    pub status: MineStatus,
    pub words: usize,
    pub anomalies_a: usize,
    pub anomalies_b: usize,
    pub discrepancies: usize,
    pub candidates: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MineReport {
    pub config: AlignConfig,
    pub videos: Vec<VideoMineStats>,
    pub total_candidates: usize,
    pub skipped: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct MineOutput {
    pub candidates: Vec<CandidateLaughter>,
    /// Transcript A with repaired timestamps; videos without a B transcript
    /// pass through unchanged.
    pub corrected_words: Vec<Word>,
    pub report: MineReport,
}

type VideoOutcome = (VideoMineStats, Vec<CandidateLaughter>, Vec<Word>);

/// Runs [`extract_candidates`] for every manifest video, in manifest order.
pub fn mine_corpus(
    manifest: &[VideoRecord],
    words_a: &[Word],
    words_b: &[Word],
    existing: &[LaughterSegment],
    cfg: &AlignConfig,
) -> Result<MineOutput> {
    validate_references(manifest, words_a, &[])?;
    validate_references(manifest, words_b, existing)?;
    let by_a = group_by_video(words_a, |w| w.video_id.as_str());
    let by_b = group_by_video(words_b, |w| w.video_id.as_str());
    let by_laugh = group_by_video(existing, |l| l.video_id.as_str());

    let per_video: Vec<Result<VideoOutcome>> = manifest
        .par_iter()
        .map(|video| {
            let id = video.video_id.as_str();
            let a: Vec<Word> = by_a.get(id).map(|v| v.iter().map(|&w| w.clone()).collect()).unwrap_or_default();
            let b: Vec<Word> = by_b.get(id).map(|v| v.iter().map(|&w| w.clone()).collect()).unwrap_or_default();
            let mut stats = VideoMineStats {
                video_id: id.to_string(),
                status: MineStatus::Ok,
                words: a.len(),
                anomalies_a: 0,
                anomalies_b: 0,
                discrepancies: 0,
                candidates: 0,
            };
            if a.is_empty() {
                stats.status = MineStatus::MissingTranscriptA;
                return Ok((stats, Vec::new(), Vec::new()));
            }
            if b.is_empty() {
                stats.status = MineStatus::MissingTranscriptB;
                return Ok((stats, Vec::new(), a));
            }
            let laughs: Vec<LaughterSegment> = by_laugh
                .get(id)
                .map(|v| v.iter().map(|&l| l.clone()).collect())
                .unwrap_or_default();
            let dual = DualTranscript {
                video_id: id.to_string(),
                words_a: a,
                words_b: b,
            };
            let ex = extract_candidates(&dual, &laughs, cfg)?;
            stats.anomalies_a = ex.anomalies_a;
            stats.anomalies_b = ex.anomalies_b;
            stats.discrepancies = ex.discrepancies;
            stats.candidates = ex.candidates.len();
            Ok((stats, ex.candidates, ex.corrected_words))
        })
        .collect();

    let mut out = MineOutput {
        report: MineReport {
            config: cfg.clone(),
            ..MineReport::default()
        },
        ..MineOutput::default()
    };
    for item in per_video {
        let (stats, cands, words) = item?;
        if stats.status != MineStatus::Ok {
            log::warn!("video {} skipped: {:?}", stats.video_id, stats.status);
            out.report.skipped.push(stats.video_id.clone());
        }
        out.report.total_candidates += cands.len();
        out.report.videos.push(stats);
        out.candidates.extend(cands);
        out.corrected_words.extend(words);
    }
    Ok(out)
}
