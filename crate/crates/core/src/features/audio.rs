//! WAV loading, downmixing and resampling to the analysis rate.

use std::path::Path;

use crate::error::{Error, Result};
use crate::num::Scalar;

pub const ANALYSIS_RATE: u32 = 22_050;

#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip<T> {
    pub samples: Vec<T>,
    pub sample_rate: u32,
    pub video_id: String,
    pub start_s: f64,
    pub end_s: f64,
}

impl<T: Scalar> AudioClip<T> {
    /// Wraps raw samples that start at time zero.
    pub fn from_samples(video_id: impl Into<String>, samples: Vec<T>, sample_rate: u32) -> Self {
        let end_s = samples.len() as f64 / sample_rate as f64;
        Self {
            samples,
            sample_rate,
            video_id: video_id.into(),
            start_s: 0.0,
            end_s,
        }
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_rate == 0 {
            return Err(Error::Audio("sample rate must be positive".into()));
        }
        let expected = ((self.end_s - self.start_s) * self.sample_rate as f64).round();
        if (self.samples.len() as f64 - expected).abs() > 1.0 {
            return Err(Error::Audio(format!(
                "clip has {} samples, expected {expected} for [{}, {}]",
                self.samples.len(),
                self.start_s,
                self.end_s
            )));
        }
        if let Some(s) = self.samples.iter().find(|s| s.is_nan() || s.abs() > T::one()) {
            return Err(Error::Audio(format!("sample {s} outside [-1, 1]")));
        }
        Ok(())
    }
}

/// A decoded mono recording at its native rate.
#[derive(Debug, Clone)]
pub struct AudioFile {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl AudioFile {
    /// Reads 16-bit integer or 32-bit float PCM WAV; multi-channel input is
    /// mean-downmixed.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let reader = hound::WavReader::open(path)
            .map_err(|e| Error::Audio(format!("{}: {e}", path.display())))?;
        let spec = reader.spec();
        let channels = spec.channels.max(1) as usize;
        let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
            (hound::SampleFormat::Int, 16) => reader
                .into_samples::<i16>()
                .map(|s| s.map(|v| v as f64 / 32768.0))
                .collect::<std::result::Result<_, _>>(),
            (hound::SampleFormat::Float, 32) => reader
                .into_samples::<f32>()
                .map(|s| s.map(|v| v as f64))
                .collect::<std::result::Result<_, _>>(),
            (fmt, bits) => {
                return Err(Error::Audio(format!(
                    "{}: unsupported codec {fmt:?}/{bits}-bit (expected 16-bit PCM or 32-bit float)",
                    path.display()
                )))
            }
        }
        .map_err(|e| Error::Audio(format!("{}: {e}", path.display())))?;
        let samples = interleaved
            .chunks(channels)
            .map(|frame| frame.iter().sum::<f64>() / channels as f64)
            .collect();
        Ok(Self {
            samples,
            sample_rate: spec.sample_rate,
        })
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    /// Cuts `[start_s, end_s)` and linearly resamples it to [`ANALYSIS_RATE`].
    pub fn clip<T: Scalar>(&self, video_id: &str, start_s: f64, end_s: f64) -> Result<AudioClip<T>> {
        let tol = 1.0 / self.sample_rate as f64;
        if !(start_s >= 0.0 && end_s > start_s && end_s <= self.duration() + tol) {
            return Err(Error::Audio(format!(
                "interval [{start_s}, {end_s}] outside recording of {:.3} s",
                self.duration()
            )));
        }
        let out_len = ((end_s - start_s) * ANALYSIS_RATE as f64).round() as usize;
        let ratio = self.sample_rate as f64 / ANALYSIS_RATE as f64;
        let offset = start_s * self.sample_rate as f64;
        let last = self.samples.len().saturating_sub(1);
        let samples = (0..out_len)
            .map(|k| {
                let pos = offset + k as f64 * ratio;
                let i = (pos.floor() as usize).min(last);
                let frac = pos - i as f64;
                let a = self.samples.get(i).copied().unwrap_or(0.0);
                let b = self.samples.get(i + 1).copied().unwrap_or(a);
                T::lit((a + (b - a) * frac).clamp(-1.0, 1.0))
            })
            .collect();
        Ok(AudioClip {
            samples,
            sample_rate: ANALYSIS_RATE,
            video_id: video_id.to_string(),
            start_s,
            end_s,
        })
    }
}

pub fn load_clip<T: Scalar>(path: impl AsRef<Path>, start_s: f64, end_s: f64) -> Result<AudioClip<T>> {
    let path = path.as_ref();
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    AudioFile::open(path)?.clip(&id, start_s, end_s)
}

/// Writes mono 16-bit PCM.
pub fn write_wav(path: impl AsRef<Path>, samples: &[f64], sample_rate: u32) -> Result<()> {
    let path = path.as_ref();
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let err = |e: hound::Error| Error::Audio(format!("{}: {e}", path.display()));
    let mut w = hound::WavWriter::create(path, spec).map_err(err)?;
    for &s in samples {
        w.write_sample((s.clamp(-1.0, 1.0) * 32767.0).round() as i16)
            .map_err(err)?;
    }
    w.finalize().map_err(err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn silence_second() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.wav");
        write_wav(&p, &vec![0.0; 22050], 22050).unwrap();
        let c: AudioClip<f64> = load_clip(&p, 0.0, 1.0).unwrap();
        assert_eq!(c.samples.len(), 22050);
        assert!(c.samples.iter().all(|&s| s == 0.0));
        c.validate().unwrap();
    }

    #[test]
    fn slice_length() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.wav");
        write_wav(&p, &vec![0.1; 22050], 22050).unwrap();
        let c: AudioClip<f32> = load_clip(&p, 0.25, 0.75).unwrap();
        assert_eq!(c.samples.len(), 11025);
        assert!(load_clip::<f64>(&p, 0.5, 1.5).is_err());
        assert!(load_clip::<f64>(&p, 0.5, 0.5).is_err());
    }

    #[test]
    fn stereo_is_mean_downmixed() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("st.wav");
        let spec = hound::WavSpec {
            channels: 2,
            sample_rate: 22050,
            bits_per_sample: 32,
            sample_format: hound::SampleFormat::Float,
        };
        let mut w = hound::WavWriter::create(&p, spec).unwrap();
        for _ in 0..2205 {
            w.write_sample(0.5f32).unwrap();
            w.write_sample(-0.1f32).unwrap();
        }
        w.finalize().unwrap();
        let c: AudioClip<f64> = load_clip(&p, 0.0, 0.1).unwrap();
        assert!(c.samples.iter().all(|&s| (s - 0.2).abs() < 1e-6));
    }

    #[test]
    fn upsampling_keeps_duration() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("lo.wav");
        write_wav(&p, &vec![0.25; 8000], 8000).unwrap();
        let c: AudioClip<f64> = load_clip(&p, 0.0, 1.0).unwrap();
        assert_eq!(c.samples.len(), 22050);
        assert!(c.samples.iter().all(|&s| (s - 0.25).abs() < 1e-3));
    }

    #[test]
    fn unsupported_codec() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("u8.wav");
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: 8000,
            bits_per_sample: 8,
            sample_format: hound::SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(&p, spec).unwrap();
        w.write_sample(0i8).unwrap();
        w.finalize().unwrap();
        assert!(matches!(AudioFile::open(&p), Err(Error::Audio(_))));
    }
}
