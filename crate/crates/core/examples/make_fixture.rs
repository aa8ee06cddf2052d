//! Regenerates `fixtures/demo`: a four-video test corpus with audio, a
//! training feature table from a separate synthetic corpus, and a forest
//! trained on it.
//!
//!     cargo run -p laughtrack --release --example make_fixture -- fixtures/demo

use std::path::PathBuf;

use laughtrack::corpus::{write_laughter, write_manifest, write_words, Language, Split};
use laughtrack::features::{export_features, extract_segments, write_wav, FeatureConfig};
use laughtrack::forest::{gate_examples, write_labels, ForestConfig, ForestModel, TrainingSet};
use laughtrack::pipeline::{PipelineConfig, PipelinePaths};
use laughtrack::synth::{synth_corpus, SynthConfig, SynthCorpus};

fn write_audio(c: &SynthCorpus, dir: &std::path::Path, rate: u32) -> laughtrack::Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| laughtrack::Error::Validation(e.to_string()))?;
    for (id, x) in &c.audio {
        write_wav(dir.join(format!("{id}.wav")), x, rate)?;
    }
    Ok(())
}

fn main() -> laughtrack::Result<()> {
    let out: PathBuf = std::env::args().nth(1).unwrap_or_else(|| "fixtures/demo".into()).into();
    std::fs::create_dir_all(out.join("train")).map_err(|e| laughtrack::Error::Validation(e.to_string()))?;

    let test_cfg = SynthConfig::default();
    let test = synth_corpus(&test_cfg);
    write_manifest(out.join("manifest.jsonl"), &test.manifest)?;
    write_words(out.join("words_a.jsonl"), &test.words_a)?;
    write_words(out.join("words_b.jsonl"), &test.words_b)?;
    write_laughter(out.join("laughter.jsonl"), &test.detector)?;
    write_laughter(out.join("gold_laughter.jsonl"), &test.gold_laughter())?;
    write_audio(&test, &out.join("audio"), test_cfg.sample_rate)?;

    let train_cfg = SynthConfig {
        languages: vec![Language::En, Language::Fr, Language::Es],
        videos_per_language: 4,
        event_rate: 0.25,
        laughter_share: 0.5,
        split: Split::Train,
        seed: 1,
        ..SynthConfig::default()
    };
    let train = synth_corpus(&train_cfg);
    let scratch = std::env::temp_dir().join(format!("laughtrack-fixture-{}", std::process::id()));
    write_audio(&train, &scratch, train_cfg.sample_rate)?;
    let segments = train.training_segments();
    write_labels(out.join("train/labels.csv"), &segments)?;
    let keys: Vec<_> = segments
        .iter()
        .filter(|(k, _)| k.end_s() - k.start_s() >= 0.1)
        .map(|(k, _)| k.clone())
        .collect();
    let rows = extract_segments::<f64>(&scratch, &keys, &FeatureConfig::default())?;
    let _ = std::fs::remove_dir_all(&scratch);
    export_features(out.join("train/features.csv"), &rows)?;

    let labels = segments.into_iter().collect();
    let set = gate_examples(&rows, &labels);
    let model = ForestModel::train(&set.x, &set.y, TrainingSet::<f64>::feature_order(), &ForestConfig::default())?;
    model.save(out.join("model.json"))?;

    let cfg = PipelineConfig {
        paths: PipelinePaths {
            manifest: Some("manifest.jsonl".into()),
            words_a: Some("words_a.jsonl".into()),
            words_b: Some("words_b.jsonl".into()),
            laughter: Some("laughter.jsonl".into()),
            audio_root: Some("audio".into()),
            model: Some("model.json".into()),
            out_dir: Some("out".into()),
        },
        ..PipelineConfig::default()
    };
    laughtrack::corpus::write_json(out.join("config.json"), &cfg)?;
    println!(
        "{}: {} videos, {} training examples",
        out.display(),
        test.manifest.len(),
        set.y.len()
    );
    Ok(())
}
