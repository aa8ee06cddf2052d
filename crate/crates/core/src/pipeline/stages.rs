//! File-to-file stages shared by the subcommands and the full pipeline.
//! Each returns a one-line JSON summary.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::align::{mine_corpus, AlignConfig, CandidateLaughter};
use crate::corpus::{
    file_digest, load_manifest, read_jsonl, read_laughter, read_words, validate_laughter, write_dataset,
    write_json, write_jsonl, write_laughter, write_words, LaughterSegment,
};
use crate::error::{Error, Result};
use crate::features::{export_features, extract_segments, import_features, FeatureConfig, SegmentKey};
use crate::forest::{
    evaluate_cv, filter_candidates, gate_examples, read_labels, verify, ForestConfig, ForestModel,
    TrainingSet, Verdict, Verification,
};
use crate::labels::{assemble_dataset, emit_dataset, label_corpus, DatasetMeta, LabelingConfig, WordLabel};

/// A report body tagged with the digest of the settings that produced it.
#[derive(Serialize)]
struct Stamped<'a, T> {
    config_digest: &'a str,
    #[serde(flatten)]
    report: &'a T,
}

fn write_stamped<T: Serialize>(path: &Path, digest: &str, report: &T) -> Result<()> {
    write_json(path, &Stamped { config_digest: digest, report })
}

pub fn read_candidates(path: &Path) -> Result<Vec<CandidateLaughter>> {
    Ok(read_jsonl(path)?.into_iter().map(|(_, c)| c).collect())
}

fn read_word_labels(path: &Path) -> Result<Vec<WordLabel>> {
    Ok(read_jsonl(path)?.into_iter().map(|(_, l)| l).collect())
}

fn optional_laughter(path: Option<&Path>) -> Result<Vec<LaughterSegment>> {
    path.map(read_laughter).transpose().map(Option::unwrap_or_default)
}

pub struct MineFiles<'a> {
    pub manifest: &'a Path,
    pub words_a: &'a Path,
    pub words_b: Option<&'a Path>,
    pub laughter: Option<&'a Path>,
    pub out_candidates: &'a Path,
    pub out_words: &'a Path,
    pub report: Option<&'a Path>,
}

pub fn mine(files: &MineFiles, cfg: &AlignConfig, digest: &str) -> Result<Value> {
    let manifest = load_manifest(files.manifest)?;
    let a = read_words(files.words_a)?;
    let b = files.words_b.map(read_words).transpose()?.unwrap_or_default();
    let existing = optional_laughter(files.laughter)?;
    let out = mine_corpus(&manifest, &a, &b, &existing, cfg)?;
    write_jsonl(files.out_candidates, &out.candidates)?;
    write_words(files.out_words, &out.corrected_words)?;
    if let Some(p) = files.report {
        write_stamped(p, digest, &out.report)?;
    }
    Ok(json!({
        "stage": "mine",
        "videos": manifest.len(),
        "skipped": out.report.skipped.len(),
        "discrepancies": out.report.videos.iter().map(|v| v.discrepancies).sum::<usize>(),
        "candidates": out.candidates.len(),
        "config_digest": digest,
    }))
}

pub enum SegmentSource<'a> {
    Candidates(&'a Path),
    /// A `labels.csv` of annotated segments.
    Labels(&'a Path),
}

/// Segments that pass the duration gate, in a stable order.
fn gated_keys(source: &SegmentSource) -> Result<(Vec<SegmentKey>, usize)> {
    let mut keys: Vec<SegmentKey> = match source {
        SegmentSource::Candidates(p) => read_candidates(p)?
            .iter()
            .map(|c| SegmentKey::new(&c.video_id, c.start_s, c.end_s))
            .collect(),
        SegmentSource::Labels(p) => {
            let mut k: Vec<SegmentKey> = read_labels(p)?.into_keys().collect();
            k.sort();
            k
        }
    };
    let total = keys.len();
    keys.retain(|k| verify(k.end_s() - k.start_s()) == Verification::Pass);
    let mut seen = std::collections::HashSet::new();
    keys.retain(|k| seen.insert(k.clone()));
    Ok((keys, total))
}

pub fn count_gated(source: &SegmentSource) -> Result<usize> {
    Ok(gated_keys(source)?.0.len())
}

pub fn extract_features(
    audio_root: Option<&Path>,
    source: &SegmentSource,
    cfg: &FeatureConfig,
    out_csv: &Path,
) -> Result<Value> {
    let (keys, total) = gated_keys(source)?;
    let rows = if keys.is_empty() {
        Vec::new()
    } else {
        let root = audio_root.ok_or_else(|| Error::Validation("no audio root given".into()))?;
        extract_segments::<f64>(root, &keys, cfg)?
    };
    export_features(out_csv, &rows)?;
    Ok(json!({
        "stage": "extract-features",
        "segments": total,
        "extracted": rows.len(),
        "auto_other": total - keys.len(),
    }))
}

pub struct TrainFiles<'a> {
    pub features: &'a Path,
    pub labels: &'a Path,
    pub out_model: &'a Path,
    pub report: Option<&'a Path>,
}

#[derive(Serialize)]
struct TrainReport {
    examples: usize,
    laughter: usize,
    other: usize,
    auto_other: usize,
    missing_features: Vec<SegmentKey>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cv: Option<crate::forest::CvReport>,
}

pub fn train(files: &TrainFiles, cfg: &ForestConfig, cv_iterations: Option<usize>, digest: &str) -> Result<Value> {
    let features = import_features::<f64>(files.features)?;
    let labels = read_labels(files.labels)?;
    let set = gate_examples(&features, &labels);
    if !set.missing_features.is_empty() {
        log::warn!("{} labelled segments have no feature row", set.missing_features.len());
    }
    let order = TrainingSet::<f64>::feature_order();
    let model = ForestModel::train(&set.x, &set.y, order.clone(), cfg)?;
    model.save(files.out_model)?;
    let cv = cv_iterations
        .map(|n| evaluate_cv(&set.x, &set.y, &order, cfg, n))
        .transpose()?;
    let laughter = set.y.iter().filter(|&&c| c == crate::forest::Class::Laughter).count();
    let report = TrainReport {
        examples: set.y.len(),
        laughter,
        other: set.y.len() - laughter,
        auto_other: set.auto_other.len(),
        missing_features: set.missing_features,
        cv,
    };
    if let Some(p) = files.report {
        write_stamped(p, digest, &report)?;
    }
    let mut summary = json!({
        "stage": "train-rf",
        "examples": report.examples,
        "laughter": report.laughter,
        "auto_other": report.auto_other,
        "trees": model.trees.len(),
        "seed": cfg.seed,
    });
    if let Some(cv) = &report.cv {
        summary["cv_macro_f1"] = json!(cv.macro_avg.f1.mean);
        summary["cv_laughter_f1"] = json!(cv.laughter.f1.mean);
    }
    Ok(summary)
}

pub struct ClassifyFiles<'a> {
    pub model: Option<&'a Path>,
    pub candidates: &'a Path,
    pub features: Option<&'a Path>,
    pub out_accepted: &'a Path,
    pub decisions: Option<&'a Path>,
}

pub fn classify(files: &ClassifyFiles, digest: &str) -> Result<Value> {
    let candidates = read_candidates(files.candidates)?;
    let gated = candidates
        .iter()
        .filter(|c| verify(c.duration()) == Verification::Pass)
        .count();
    let features: HashMap<SegmentKey, _> = match files.features {
        Some(p) => import_features::<f64>(p)?.into_iter().collect(),
        None => HashMap::new(),
    };
    let outcome = match files.model {
        Some(p) => filter_candidates(&candidates, &features, &ForestModel::<f64>::load(p)?)?,
        None if gated == 0 => {
            // nothing reaches the forest, so no model is needed
            let empty = ForestModel::<f64> {
                feature_order: Vec::new(),
                config: ForestConfig::default(),
                trees: Vec::new(),
            };
            filter_candidates(&candidates, &features, &empty)?
        }
        None => return Err(Error::Validation("candidates need a model to be classified".into())),
    };
    write_laughter(files.out_accepted, &outcome.accepted)?;
    if let Some(p) = files.decisions {
        write_stamped(p, digest, &outcome)?;
    }
    Ok(json!({
        "stage": "classify",
        "candidates": candidates.len(),
        "auto_other": outcome.count(Verdict::AutoOther),
        "rejected": outcome.count(Verdict::Rejected),
        "accepted": outcome.count(Verdict::Accepted),
    }))
}

/// Unions laughter tracks, ordered by video, start and end.
pub fn merge_laughter(tracks: &[Vec<LaughterSegment>]) -> Result<Vec<LaughterSegment>> {
    let mut all: Vec<LaughterSegment> = tracks.iter().flatten().cloned().collect();
    all.sort_by(|a, b| {
        a.video_id
            .cmp(&b.video_id)
            .then(a.start_s.total_cmp(&b.start_s))
            .then(a.end_s.total_cmp(&b.end_s))
    });
    all.dedup_by(|a, b| a.video_id == b.video_id && a.start_s == b.start_s && a.end_s == b.end_s && a.source == b.source);
    validate_laughter(&all, |i| format!("merged segment {i}"))?;
    Ok(all)
}

pub fn merge(inputs: &[&Path], out: &Path) -> Result<Value> {
    let tracks = inputs.iter().map(read_laughter).collect::<Result<Vec<_>>>()?;
    let merged = merge_laughter(&tracks)?;
    write_laughter(out, &merged)?;
    Ok(json!({
        "stage": "merge-laughter",
        "inputs": tracks.iter().map(Vec::len).collect::<Vec<_>>(),
        "segments": merged.len(),
    }))
}

pub struct LabelFiles<'a> {
    pub manifest: &'a Path,
    pub words: &'a Path,
    pub laughter: Option<&'a Path>,
    pub out_labels: &'a Path,
    pub report: Option<&'a Path>,
}

pub fn label(files: &LabelFiles, cfg: &LabelingConfig, digest: &str) -> Result<Value> {
    let manifest = load_manifest(files.manifest)?;
    let words = read_words(files.words)?;
    let laughter = optional_laughter(files.laughter)?;
    crate::corpus::validate_references(&manifest, &words, &laughter)?;
    let (rows, report) = label_corpus(&manifest, &words, &laughter, cfg);
    write_jsonl(files.out_labels, &rows)?;
    if let Some(p) = files.report {
        write_stamped(p, digest, &report)?;
    }
    Ok(json!({
        "stage": "label",
        "scheme": cfg.scheme,
        "words": report.total.words,
        "positives": report.total.positives,
        "skipped_videos": report.skipped_videos.len(),
        "unattached_laughs": report.unattached_laughs,
    }))
}

pub enum LabelSource<'a> {
    /// Precomputed `labels.jsonl`.
    Labels(&'a Path),
    /// Laughter segments, labeled on the fly; `None` means no laughter.
    Laughter(Option<&'a Path>),
}

pub struct EmitFiles<'a> {
    pub manifest: &'a Path,
    pub words: &'a Path,
    pub source: LabelSource<'a>,
    pub out_dataset: &'a Path,
}

/// Writes the dataset and a `meta.json` beside it.
pub fn emit(files: &EmitFiles, cfg: &LabelingConfig, digest: &str) -> Result<Value> {
    let manifest = load_manifest(files.manifest)?;
    let words = read_words(files.words)?;
    crate::corpus::validate_references(&manifest, &words, &[])?;
    let mut inputs = BTreeMap::new();
    inputs.insert("manifest".to_string(), file_digest(files.manifest)?);
    inputs.insert("words".to_string(), file_digest(files.words)?);
    let out = match &files.source {
        LabelSource::Labels(p) => {
            inputs.insert("labels".to_string(), file_digest(p)?);
            assemble_dataset(&manifest, &words, &read_word_labels(p)?, cfg)?
        }
        LabelSource::Laughter(p) => {
            if let Some(p) = p {
                inputs.insert("laughter".to_string(), file_digest(p)?);
            }
            let laughter = optional_laughter(*p)?;
            crate::corpus::validate_references(&manifest, &words, &laughter)?;
            emit_dataset(&manifest, &words, &laughter, cfg)
        }
    };
    write_dataset(files.out_dataset, &out.sequences)?;
    let meta = DatasetMeta {
        scheme: cfg.scheme,
        config_digest: digest.to_string(),
        inputs,
        counts: out.report.total.clone(),
    };
    write_json(files.out_dataset.with_file_name("meta.json"), &meta)?;
    Ok(json!({
        "stage": "emit-dataset",
        "sequences": out.sequences.len(),
        "words": out.report.total.words,
        "positives": out.report.total.positives,
        "positive_rate": out.report.total.positive_rate(),
        "skipped_videos": out.report.skipped_videos.len(),
        "dataset_sha256": file_digest(files.out_dataset)?,
    }))
}
