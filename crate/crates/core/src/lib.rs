//! Laughter corpus construction and evaluation for stand-up comedy recordings.
//!
//! The pipeline recovers audience laughter missed by an acoustic detector from
//! timestamp disagreements between two ASR transcripts ([`align`]), checks the
//! recovered segments with a random forest over acoustic descriptors
//! ([`features`], [`forest`]), turns laughter into word-level labels
//! ([`labels`]) and scores detectors and labelers ([`eval`]).
//!
//! Numeric kernels are generic over [`num::Scalar`] (`f32` or `f64`); the
//! aliases below fix them to `f64`, which is what the file formats use.

pub mod align;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod forest;
pub mod interval;
pub mod labels;
pub mod num;
pub mod pipeline;
pub mod synth;

pub use error::{Error, Result};

pub type Interval = interval::Interval<f64>;
pub type AudioClip = features::AudioClip<f64>;
pub type FeatureVector = features::FeatureVector<f64>;
pub type ForestModel = forest::ForestModel<f64>;
