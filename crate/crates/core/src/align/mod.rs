//! Dual-transcript alignment and laughter candidate mining.

mod anomaly;
mod candidates;
mod mine;
mod tokens;

pub use anomaly::{find_anomalous_words, AlignConfig};
pub use candidates::{extract_candidates, CandidateLaughter, DualTranscript, Extraction};
pub use mine::{mine_corpus, MineOutput, MineReport, MineStatus, VideoMineStats};
pub use tokens::{align_strs, align_tokens, alignment_cost, AlignOp, AlignedPair};
