mod args;

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use serde_json::{json, Value};

use args::{Cli, Command, SchemeArg};
use laughtrack::corpus::{corpus_stats, load_manifest, read_dataset, read_laughter, read_words, write_json};
use laughtrack::eval::{eval_segments, eval_tokens};
use laughtrack::labels::LabelScheme;
use laughtrack::pipeline::stages::{
    self, ClassifyFiles, EmitFiles, LabelFiles, LabelSource, MineFiles, SegmentSource, TrainFiles,
};
use laughtrack::pipeline::{run_pipeline, PipelineConfig};

fn summary(v: &Value) {
    eprintln!("{v}");
}

fn pick<'a>(flag: &'a Option<PathBuf>, config: &'a Option<PathBuf>, name: &str) -> Result<&'a Path> {
    flag.as_deref()
        .or(config.as_deref())
        .with_context(|| format!("--{name} is required (or set it in the config)"))
}

fn scheme(s: SchemeArg) -> LabelScheme {
    match s {
        SchemeArg::Span => LabelScheme::Span,
        SchemeArg::NextWord => LabelScheme::NextWord,
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker threads")?;
    }
    let paths = cfg.paths.clone();

    match cli.command {
        Command::Stats(a) => {
            let manifest = load_manifest(pick(&a.manifest, &paths.manifest, "manifest")?)?;
            let words = read_words(pick(&a.words, &paths.words_a, "words")?)?;
            let laughter = match a.laughter.as_ref().or(paths.laughter.as_ref()) {
                Some(p) => read_laughter(p)?,
                None => Vec::new(),
            };
            let report = corpus_stats(&manifest, &words, &laughter)?;
            print!("{}", report.to_table());
            if let Some(out) = &a.out {
                write_json(out, &report)?;
            }
            summary(&json!({
                "stage": "stats",
                "videos": report.total.videos,
                "words": report.total.words,
                "laughter": report.total.laughter,
            }));
        }
        Command::Mine(a) => {
            if let Some(v) = a.abs_dur {
                cfg.align.abs_dur_s = v;
            }
            if let Some(v) = a.rel_factor {
                cfg.align.rel_factor = v;
            }
            if let Some(v) = a.min_dur {
                cfg.align.min_candidate_dur = v;
            }
            if let Some(v) = a.max_overlap {
                cfg.align.max_existing_overlap = v;
            }
            let files = MineFiles {
                manifest: pick(&a.manifest, &paths.manifest, "manifest")?,
                words_a: pick(&a.words_a, &paths.words_a, "words-a")?,
                words_b: a.words_b.as_deref().or(paths.words_b.as_deref()),
                laughter: a.laughter.as_deref().or(paths.laughter.as_deref()),
                out_candidates: &a.out_candidates,
                out_words: &a.out_words,
                report: a.report.as_deref(),
            };
            summary(&stages::mine(&files, &cfg.align, &cfg.digest())?);
        }
        Command::ExtractFeatures(a) => {
            let source = match (&a.from.candidates, &a.from.segments) {
                (Some(c), _) => SegmentSource::Candidates(c),
                (None, Some(s)) => SegmentSource::Labels(s),
                (None, None) => unreachable!("clap requires one source"),
            };
            let root = a.audio_root.as_deref().or(paths.audio_root.as_deref());
            summary(&stages::extract_features(root, &source, &cfg.features, &a.out)?);
        }
        Command::TrainRf(a) => {
            let mut forest = cfg.forest_config();
            if let Some(n) = a.trees {
                forest.n_estimators = n;
            }
            if let Some(d) = a.max_depth {
                forest.max_depth = d;
            }
            cfg.forest = forest.clone();
            let files = TrainFiles {
                features: &a.features,
                labels: &a.labels,
                out_model: &a.out,
                report: a.report.as_deref(),
            };
            summary(&stages::train(&files, &forest, a.cv, &cfg.digest())?);
        }
        Command::Classify(a) => {
            let files = ClassifyFiles {
                model: a.model.as_deref().or(paths.model.as_deref()),
                candidates: &a.candidates,
                features: a.features.as_deref(),
                out_accepted: &a.out,
                decisions: a.decisions.as_deref(),
            };
            summary(&stages::classify(&files, &cfg.digest())?);
        }
        Command::MergeLaughter(a) => {
            let inputs: Vec<&Path> = a.inputs.iter().map(PathBuf::as_path).collect();
            summary(&stages::merge(&inputs, &a.out)?);
        }
        Command::Label(a) => {
            if let Some(s) = a.scheme {
                cfg.labeling.scheme = scheme(s);
            }
            let files = LabelFiles {
                manifest: pick(&a.manifest, &paths.manifest, "manifest")?,
                words: &a.words,
                laughter: a.laughter.as_deref(),
                out_labels: &a.out,
                report: a.report.as_deref(),
            };
            summary(&stages::label(&files, &cfg.labeling, &cfg.digest())?);
        }
        Command::EmitDataset(a) => {
            if let Some(s) = a.scheme {
                cfg.labeling.scheme = scheme(s);
            }
            let source = match &a.labels {
                Some(p) => LabelSource::Labels(p),
                None => LabelSource::Laughter(a.laughter.as_deref()),
            };
            let files = EmitFiles {
                manifest: pick(&a.manifest, &paths.manifest, "manifest")?,
                words: &a.words,
                source,
                out_dataset: &a.out,
            };
            summary(&stages::emit(&files, &cfg.labeling, &cfg.digest())?);
        }
        Command::EvalSegments(a) => {
            if let Some(t) = a.iou {
                cfg.eval.iou_threshold = t;
            }
            let pred = read_laughter(&a.pred)?;
            let gold = read_laughter(&a.gold)?;
            let languages: Option<HashMap<String, _>> = match &a.manifest {
                Some(p) => Some(load_manifest(p)?.into_iter().map(|v| (v.video_id, v.language)).collect()),
                None => None,
            };
            let report = eval_segments(&pred, &gold, languages.as_ref(), &cfg.eval)?;
            print!("{}", report.to_table(a.by_language));
            if let Some(out) = &a.out {
                write_json(out, &report)?;
            }
            summary(&json!({
                "stage": "eval-segments",
                "iou_threshold": cfg.eval.iou_threshold,
                "precision": report.positive.precision,
                "recall": report.positive.recall,
                "f1": report.positive.f1,
            }));
        }
        Command::EvalTokens(a) => {
            let pred = read_dataset(&a.pred)?;
            let gold = read_dataset(&a.gold)?;
            let report = eval_tokens(&pred, &gold)?;
            print!("{}", report.to_table(a.by_language));
            if let Some(out) = &a.out {
                write_json(out, &report)?;
            }
            summary(&json!({
                "stage": "eval-tokens",
                "f1": report.positive.f1,
                "language_mean_f1": report.language_mean_f1,
            }));
        }
        Command::Pipeline(a) => {
            let p = &mut cfg.paths;
            for (flag, slot) in [
                (a.manifest, &mut p.manifest),
                (a.words_a, &mut p.words_a),
                (a.words_b, &mut p.words_b),
                (a.laughter, &mut p.laughter),
                (a.audio_root, &mut p.audio_root),
                (a.model, &mut p.model),
                (a.out_dir, &mut p.out_dir),
            ] {
                if flag.is_some() {
                    *slot = flag;
                }
            }
            if let Some(s) = a.scheme {
                cfg.labeling.scheme = scheme(s);
            }
            run_pipeline(&cfg, summary)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
