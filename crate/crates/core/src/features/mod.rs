//! Acoustic descriptors of candidate segments.

mod audio;
mod batch;
mod dsp;
mod extract;
mod table;
mod vector;

pub use batch::{audio_path, extract_segments};
pub use audio::{load_clip, write_wav, AudioClip, AudioFile, ANALYSIS_RATE};
pub use extract::{extract_features, FeatureConfig, FeatureExtractor};
pub use table::{export_features, import_features, SegmentKey};
pub use vector::{index, FeatureVector, FEATURE_NAMES, N_FEATURES};
