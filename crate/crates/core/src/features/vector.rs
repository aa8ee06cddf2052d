use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Scalar;

pub const N_FEATURES: usize = 70;

/// Column order of every feature vector and of `features.csv`.
pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "duration",
    "voiced_ratio",
    "voiced_frames",
    "burst_count",
    "temporal_centroid",
    "rms_mean",
    "rms_std",
    "rms_slope",
    "energy_p90",
    "spectral_bandwidth",
    "rolloff_85",
    "rolloff_95",
    "spectral_flatness",
    "spectral_contrast",
    "spectral_centroid",
    "pitch_median",
    "pitch_std",
    "hnr",
    "mod_energy_4_12",
    "chroma_1",
    "chroma_2",
    "chroma_3",
    "chroma_4",
    "chroma_5",
    "chroma_6",
    "chroma_7",
    "chroma_8",
    "chroma_9",
    "chroma_10",
    "chroma_11",
    "chroma_12",
    "mfcc_1",
    "mfcc_2",
    "mfcc_3",
    "mfcc_4",
    "mfcc_5",
    "mfcc_6",
    "mfcc_7",
    "mfcc_8",
    "mfcc_9",
    "mfcc_10",
    "mfcc_11",
    "mfcc_12",
    "mfcc_13",
    "delta_mfcc_1",
    "delta_mfcc_2",
    "delta_mfcc_3",
    "delta_mfcc_4",
    "delta_mfcc_5",
    "delta_mfcc_6",
    "delta_mfcc_7",
    "delta_mfcc_8",
    "delta_mfcc_9",
    "delta_mfcc_10",
    "delta_mfcc_11",
    "delta_mfcc_12",
    "delta_mfcc_13",
    "delta2_mfcc_1",
    "delta2_mfcc_2",
    "delta2_mfcc_3",
    "delta2_mfcc_4",
    "delta2_mfcc_5",
    "delta2_mfcc_6",
    "delta2_mfcc_7",
    "delta2_mfcc_8",
    "delta2_mfcc_9",
    "delta2_mfcc_10",
    "delta2_mfcc_11",
    "delta2_mfcc_12",
    "delta2_mfcc_13",
];

/// Offsets of the feature groups inside [`FEATURE_NAMES`].
pub mod index {
    pub const DURATION: usize = 0;
    pub const VOICED_RATIO: usize = 1;
    pub const VOICED_FRAMES: usize = 2;
    pub const BURST_COUNT: usize = 3;
    pub const TEMPORAL_CENTROID: usize = 4;
    pub const RMS_MEAN: usize = 5;
    pub const RMS_STD: usize = 6;
    pub const RMS_SLOPE: usize = 7;
    pub const ENERGY_P90: usize = 8;
    pub const SPECTRAL_BANDWIDTH: usize = 9;
    pub const ROLLOFF_85: usize = 10;
    pub const ROLLOFF_95: usize = 11;
    pub const SPECTRAL_FLATNESS: usize = 12;
    pub const SPECTRAL_CONTRAST: usize = 13;
    pub const SPECTRAL_CENTROID: usize = 14;
    pub const PITCH_MEDIAN: usize = 15;
    pub const PITCH_STD: usize = 16;
    pub const HNR: usize = 17;
    pub const MOD_ENERGY_4_12: usize = 18;
    pub const CHROMA: usize = 19;
    pub const MFCC: usize = 31;
    pub const DELTA_MFCC: usize = 44;
    pub const DELTA2_MFCC: usize = 57;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector<T> {
    values: Vec<T>,
}

impl<T: Scalar> FeatureVector<T> {
    pub fn zeros() -> Self {
        Self {
            values: vec![T::zero(); N_FEATURES],
        }
    }

    /// Checks length, finiteness and the bounded features.
    pub fn from_values(values: Vec<T>) -> Result<Self> {
        if values.len() != N_FEATURES {
            return Err(Error::Validation(format!(
                "feature vector has {} values, expected {N_FEATURES}",
                values.len()
            )));
        }
        let fv = Self { values };
        fv.validate()?;
        Ok(fv)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("feature {} is not finite", FEATURE_NAMES[i])));
        }
        let unit = |i: usize| {
            let v = self.values[i];
            if v < T::zero() || v > T::one() {
                Err(Error::Validation(format!("feature {} = {v} outside [0, 1]", FEATURE_NAMES[i])))
            } else {
                Ok(())
            }
        };
        unit(index::VOICED_RATIO)?;
        unit(index::SPECTRAL_FLATNESS)?;
        if self.values[index::DURATION] <= T::zero() {
            return Err(Error::Validation("feature duration must be positive".into()));
        }
        Ok(())
    }

    pub fn as_slice(&self) -> &[T] {
        &self.values
    }

    pub(crate) fn set(&mut self, i: usize, v: T) {
        self.values[i] = v;
    }

    pub fn get(&self, name: &str) -> Option<T> {
        FEATURE_NAMES
            .iter()
            .position(|n| *n == name)
            .map(|i| self.values[i])
    }

    pub fn duration(&self) -> T {
        self.values[index::DURATION]
    }

    pub fn mfcc(&self) -> &[T] {
        &self.values[index::MFCC..index::MFCC + 13]
    }

    pub fn chroma(&self) -> &[T] {
        &self.values[index::CHROMA..index::CHROMA + 12]
    }
}

impl<T> std::ops::Index<usize> for FeatureVector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.values[i]
    }
}
