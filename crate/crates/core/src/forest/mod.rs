//! Verification gate and random-forest classifier for laughter candidates.

mod cv;
mod data;
mod filter;
mod model;
mod tree;
mod verify;

use serde::{Deserialize, Serialize};

pub use cv::{binary_scores, evaluate_cv, holdout_round, stratified_split, CvReport, Interval95, MetricIntervals, RoundScores};
pub use data::{gate_examples, read_labels, write_labels, TrainingSet};
pub use filter::{filter_candidates, CandidateDecision, FilterOutcome, Verdict};
pub use model::{derive_seed, FeaturesPerSplit, ForestConfig, ForestModel};
pub use tree::{Node, Tree};
pub use verify::{verify, Verification, MIN_VERIFIED_DURATION_S};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum Class {
    Other = 0,
    Laughter = 1,
}
