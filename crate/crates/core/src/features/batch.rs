//! Feature extraction for many segments of many recordings.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::audio::{AudioFile, ANALYSIS_RATE};
use super::extract::{FeatureConfig, FeatureExtractor};
use super::table::SegmentKey;
use super::vector::FeatureVector;
use crate::error::{Error, Result};
use crate::num::Scalar;

/// Location of a video's recording under `audio_root`.
pub fn audio_path(audio_root: &Path, video_id: &str) -> PathBuf {
    audio_root.join(format!("{video_id}.wav"))
}

type Indexed<T> = Vec<(usize, FeatureVector<T>)>;

/// Extracts one vector per key, in key order. Each recording is decoded once.
pub fn extract_segments<T: Scalar>(
    audio_root: &Path,
    keys: &[SegmentKey],
    cfg: &FeatureConfig,
) -> Result<Vec<(SegmentKey, FeatureVector<T>)>> {
    let mut videos: Vec<&str> = keys.iter().map(|k| k.video_id.as_str()).collect();
    videos.sort_unstable();
    videos.dedup();

    let extractor = FeatureExtractor::<T>::new(cfg.clone(), ANALYSIS_RATE);
    let per_video: Vec<Result<Indexed<T>>> = videos
        .par_iter()
        .map(|&id| {
            let path = audio_path(audio_root, id);
            let audio = AudioFile::open(&path)?;
            keys.iter()
                .enumerate()
                .filter(|(_, k)| k.video_id == id)
                .map(|(i, k)| {
                    let clip = audio.clip::<T>(id, k.start_s(), k.end_s()).map_err(|e| {
                        Error::Audio(format!("{}: {e}", path.display()))
                    })?;
                    let fv = extractor.extract(&clip).map_err(|e| {
                        Error::Audio(format!("{id} [{}, {}]: {e}", k.start_s(), k.end_s()))
                    })?;
                    Ok((i, fv))
                })
                .collect()
        })
        .collect();

    let mut slots: Vec<Option<FeatureVector<T>>> = vec![None; keys.len()];
    for v in per_video {
        for (i, fv) in v? {
            slots[i] = Some(fv);
        }
    }
    Ok(keys
        .iter()
        .cloned()
        .zip(slots.into_iter().map(|s| s.expect("every key belongs to a video")))
        .collect())
}
