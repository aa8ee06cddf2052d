//! Detection and labeling scores.

mod metrics;
mod report;
mod segments;
mod tokens;

pub use crate::interval::iou;
pub use metrics::{f1, ClassScores, Confusion, MacroScores};
pub use report::{MetricReport, ReportKind};
pub use segments::{eval_segments, match_segments, EvalConfig, Matching};
pub use tokens::eval_tokens;
