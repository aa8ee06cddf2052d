use serde::{Deserialize, Serialize};

use crate::corpus::round_ms;

/// Segments shorter than this never reach the classifier.
pub const MIN_VERIFIED_DURATION_S: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verification {
    Pass,
    /// Labelled non-laughter without classification and left out of
    /// training and evaluation.
    AutoOther,
}

/// Duration gate; durations are compared on the millisecond grid so that
/// `0.7 - 0.2` counts as exactly 0.5 s.
pub fn verify(duration_s: f64) -> Verification {
    if round_ms(duration_s) < MIN_VERIFIED_DURATION_S {
        Verification::AutoOther
    } else {
        Verification::Pass
    }
}
