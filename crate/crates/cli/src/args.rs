use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "laughtrack", version, about = "Laughter corpus construction and evaluation")]
pub struct Cli {
    /// JSON pipeline config; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for the random forest.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Corpus size per language.
    Stats(StatsArgs),
    /// Find laughter candidates from transcript disagreements.
    Mine(MineArgs),
    /// Acoustic features for candidates or labelled segments.
    ExtractFeatures(ExtractArgs),
    /// Train the candidate classifier.
    TrainRf(TrainArgs),
    /// Keep the candidates the classifier accepts.
    Classify(ClassifyArgs),
    /// Union laughter tracks.
    MergeLaughter(MergeArgs),
    /// Word-level labels from laughter.
    Label(LabelArgs),
    /// Write dataset.jsonl and meta.json.
    EmitDataset(EmitArgs),
    /// Segment IoU scores against gold laughter.
    EvalSegments(EvalSegmentsArgs),
    /// Word-level scores of predicted labels.
    EvalTokens(EvalTokensArgs),
    /// mine, extract-features, classify, merge-laughter, label, emit-dataset.
    Pipeline(PipelineArgs),
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub words: Option<PathBuf>,
    #[arg(long)]
    pub laughter: Option<PathBuf>,
    /// Also write the report as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MineArgs {
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub words_a: Option<PathBuf>,
    #[arg(long)]
    pub words_b: Option<PathBuf>,
    /// Existing laughter; candidates it already covers are dropped.
    #[arg(long)]
    pub laughter: Option<PathBuf>,
    #[arg(long)]
    pub out_candidates: PathBuf,
    #[arg(long)]
    pub out_words: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub abs_dur: Option<f64>,
    #[arg(long)]
    pub rel_factor: Option<f64>,
    #[arg(long)]
    pub min_dur: Option<f64>,
    #[arg(long)]
    pub max_overlap: Option<f64>,
}

#[derive(Args, Debug)]
#[group(id = "source", required = true, multiple = false)]
pub struct SegmentsFrom {
    #[arg(long, group = "source")]
    pub candidates: Option<PathBuf>,
    /// A labels.csv of annotated segments.
    #[arg(long, group = "source")]
    pub segments: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    /// Directory of `{video_id}.wav`.
    #[arg(long)]
    pub audio_root: Option<PathBuf>,
    #[command(flatten)]
    pub from: SegmentsFrom,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Repeated hold-out rounds to estimate scores.
    #[arg(long)]
    pub cv: Option<usize>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub trees: Option<usize>,
    #[arg(long)]
    pub max_depth: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub candidates: PathBuf,
    /// features.csv covering the candidates that pass the duration gate.
    #[arg(long)]
    pub features: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub decisions: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MergeArgs {
    #[arg(long = "input", required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum SchemeArg {
    Span,
    NextWord,
}

#[derive(Args, Debug)]
pub struct LabelArgs {
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub words: PathBuf,
    #[arg(long)]
    pub laughter: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EmitArgs {
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub words: PathBuf,
    /// labels.jsonl from `label`.
    #[arg(long, conflicts_with = "laughter")]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub laughter: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
}

#[derive(Args, Debug)]
pub struct EvalSegmentsArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub gold: PathBuf,
    /// Needed for the per-language rows.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub iou: Option<f64>,
    #[arg(long)]
    pub by_language: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvalTokensArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub by_language: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PipelineArgs {
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub words_a: Option<PathBuf>,
    #[arg(long)]
    pub words_b: Option<PathBuf>,
    #[arg(long)]
    pub laughter: Option<PathBuf>,
    #[arg(long)]
    pub audio_root: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
}
