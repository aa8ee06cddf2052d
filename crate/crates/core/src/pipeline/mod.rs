//! End-to-end runs: mine, classify, merge, label, emit.

mod config;
pub mod stages;

use std::path::{Path, PathBuf};

use serde_json::Value;

pub use config::{PipelineConfig, PipelinePaths};
use stages::{ClassifyFiles, EmitFiles, LabelFiles, LabelSource, MineFiles, SegmentSource};

use crate::error::{Error, Result};

/// Artifact names inside the output directory.
pub mod artifacts {
    pub const CANDIDATES: &str = "candidates.jsonl";
    pub const CORRECTED_WORDS: &str = "words.corrected.jsonl";
    pub const MINE_REPORT: &str = "mine_report.json";
    pub const CANDIDATE_FEATURES: &str = "candidate_features.csv";
    pub const ACCEPTED: &str = "accepted.jsonl";
    pub const DECISIONS: &str = "decisions.json";
    pub const MERGED_LAUGHTER: &str = "laughter.merged.jsonl";
    pub const LABELS: &str = "labels.jsonl";
    pub const LABEL_REPORT: &str = "label_report.json";
    pub const DATASET: &str = "dataset.jsonl";
    pub const META: &str = "meta.json";
}

/// Runs every stage in order, writing into `paths.out_dir`, and returns
/// the stage summaries. `on_stage` sees each summary as soon as it exists.
pub fn run_pipeline(cfg: &PipelineConfig, mut on_stage: impl FnMut(&Value)) -> Result<Vec<Value>> {
    let p = &cfg.paths;
    let manifest = cfg.require(&p.manifest, "manifest")?;
    let words_a = cfg.require(&p.words_a, "words_a")?;
    let out_dir = cfg.require(&p.out_dir, "out_dir")?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let at = |name: &str| -> PathBuf { out_dir.join(name) };
    let digest = cfg.digest();
    let mut summaries = Vec::new();
    let mut record = |v: Value| {
        on_stage(&v);
        summaries.push(v);
    };

    let candidates = at(artifacts::CANDIDATES);
    let corrected = at(artifacts::CORRECTED_WORDS);
    record(stages::mine(
        &MineFiles {
            manifest,
            words_a,
            words_b: p.words_b.as_deref(),
            laughter: p.laughter.as_deref(),
            out_candidates: &candidates,
            out_words: &corrected,
            report: Some(&at(artifacts::MINE_REPORT)),
        },
        &cfg.align,
        &digest,
    )?);

    let features = at(artifacts::CANDIDATE_FEATURES);
    record(stages::extract_features(
        p.audio_root.as_deref(),
        &SegmentSource::Candidates(&candidates),
        &cfg.features,
        &features,
    )?);

    let accepted = at(artifacts::ACCEPTED);
    record(stages::classify(
        &ClassifyFiles {
            model: p.model.as_deref(),
            candidates: &candidates,
            features: Some(&features),
            out_accepted: &accepted,
            decisions: Some(&at(artifacts::DECISIONS)),
        },
        &digest,
    )?);

    let merged = at(artifacts::MERGED_LAUGHTER);
    let mut tracks: Vec<&Path> = p.laughter.iter().map(PathBuf::as_path).collect();
    tracks.push(&accepted);
    record(stages::merge(&tracks, &merged)?);

    let labels = at(artifacts::LABELS);
    record(stages::label(
        &LabelFiles {
            manifest,
            words: &corrected,
            laughter: Some(&merged),
            out_labels: &labels,
            report: Some(&at(artifacts::LABEL_REPORT)),
        },
        &cfg.labeling,
        &digest,
    )?);

    record(stages::emit(
        &EmitFiles {
            manifest,
            words: &corrected,
            source: LabelSource::Labels(&labels),
            out_dataset: &at(artifacts::DATASET),
        },
        &cfg.labeling,
        &digest,
    )?);
    Ok(summaries)
}
