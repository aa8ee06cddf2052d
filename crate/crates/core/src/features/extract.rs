//! The 70-dimensional acoustic descriptor of a clip.
//!
//! Frame-level spectral summaries are pooled with spectral-energy weights, so
//! silent frames carry no weight and a uniform gain leaves them unchanged.
//! Cepstral features are mean-pooled over all frames.

use serde::{Deserialize, Serialize};

use super::audio::AudioClip;
use super::dsp::{dct_matrix, delta, dft_power, frame_starts, hann, mel_filterbank, Spectra};
use super::vector::{index, FeatureVector};
use crate::error::{Error, Result};
use crate::num::{median, percentile_sorted, std_dev, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    pub frame_len: usize,
    pub hop: usize,
    pub n_mels: usize,
    pub pitch_min_hz: f64,
    pub pitch_max_hz: f64,
    /// Minimum normalised autocorrelation peak for a voiced frame.
    pub voicing_threshold: f64,
    pub delta_width: usize,
    /// Dynamic range kept in the log-mel spectrogram, dB.
    pub top_db: f64,
    pub min_duration_s: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            frame_len: 2048,
            hop: 512,
            n_mels: 40,
            pitch_min_hz: 60.0,
            pitch_max_hz: 500.0,
            voicing_threshold: 0.5,
            delta_width: 9,
            top_db: 80.0,
            min_duration_s: 0.1,
        }
    }
}

const N_MFCC: usize = 13;
const CONTRAST_EDGES_HZ: [f64; 8] = [0.0, 200.0, 400.0, 800.0, 1600.0, 3200.0, 6400.0, 12800.0];

/// Holds the window, filterbank and FFT plans for one sample rate.
pub struct FeatureExtractor<T: Scalar> {
    cfg: FeatureConfig,
    sample_rate: u32,
    window: Vec<T>,
    mel: Vec<Vec<T>>,
    dct: Vec<Vec<T>>,
    spectra: Spectra<T>,
}

#[derive(Default)]
struct FrameSpectral<T> {
    weight: T,
    centroid: T,
    bandwidth: T,
    rolloff_85: T,
    rolloff_95: T,
    flatness: T,
    contrast: T,
    chroma: [T; 12],
}

impl<T: Scalar> FeatureExtractor<T> {
    pub fn new(cfg: FeatureConfig, sample_rate: u32) -> Self {
        let window = hann(cfg.frame_len);
        let mel = mel_filterbank(cfg.n_mels, cfg.frame_len, sample_rate as f64);
        let dct = dct_matrix(N_MFCC, cfg.n_mels);
        let spectra = Spectra::new(cfg.frame_len);
        Self {
            cfg,
            sample_rate,
            window,
            mel,
            dct,
            spectra,
        }
    }

    fn bin_hz(&self, k: usize) -> T {
        T::lit(k as f64 * self.sample_rate as f64 / self.cfg.frame_len as f64)
    }

    pub fn extract(&self, clip: &AudioClip<T>) -> Result<FeatureVector<T>> {
        if clip.sample_rate != self.sample_rate {
            return Err(Error::Audio(format!(
                "clip rate {} Hz differs from extractor rate {} Hz",
                clip.sample_rate, self.sample_rate
            )));
        }
        let duration = clip.duration();
        if duration + 1e-9 < self.cfg.min_duration_s {
            return Err(Error::Audio(format!(
                "clip of {duration:.3} s is shorter than {} s",
                self.cfg.min_duration_s
            )));
        }
        let x = &clip.samples;
        let sr = self.sample_rate as f64;
        let (flen, hop) = (self.cfg.frame_len, self.cfg.hop);
        let starts = frame_starts(x.len(), flen, hop);
        let n_frames = starts.len();

        let mut rms = Vec::with_capacity(n_frames);
        let mut spectral = Vec::with_capacity(n_frames);
        let mut log_mel = Vec::with_capacity(n_frames);
        let mut pitch = Vec::with_capacity(n_frames);
        for &s in &starts {
            let frame: Vec<T> = (s..s + flen).map(|i| x.get(i).copied().unwrap_or_else(T::zero)).collect();
            let used = (x.len() - s).min(flen);
            let ms = frame[..used].iter().fold(T::zero(), |a, &v| a + v * v) / T::from_usize_lossy(used);
            rms.push(ms.sqrt());

            let windowed: Vec<T> = frame.iter().zip(&self.window).map(|(&a, &w)| a * w).collect();
            let power = self.spectra.power(&windowed);
            spectral.push(self.frame_spectral(&power));
            log_mel.push(self.mel_energies(&power));
            pitch.push(self.frame_pitch(&frame[..used]));
        }

        let mut fv = FeatureVector::zeros();
        fv.set(index::DURATION, T::lit(duration));

        // voicing
        let rms_median = median(&rms);
        let voiced: Vec<bool> = rms
            .iter()
            .zip(&pitch)
            .map(|(&r, &(_, conf))| r > T::lit(0.5) * rms_median && conf > T::lit(self.cfg.voicing_threshold))
            .collect();
        let n_voiced = voiced.iter().filter(|&&v| v).count();
        let bursts = voiced
            .iter()
            .enumerate()
            .filter(|&(i, &v)| v && (i == 0 || !voiced[i - 1]))
            .count();
        fv.set(index::VOICED_RATIO, T::from_usize_lossy(n_voiced) / T::from_usize_lossy(n_frames));
        fv.set(index::VOICED_FRAMES, T::from_usize_lossy(n_voiced));
        fv.set(index::BURST_COUNT, T::from_usize_lossy(bursts));
        fv.set(index::TEMPORAL_CENTROID, temporal_centroid(x));

        // energy
        fv.set(index::RMS_MEAN, crate::num::mean(&rms));
        fv.set(index::RMS_STD, std_dev(&rms));
        fv.set(index::RMS_SLOPE, slope(&rms, T::lit(hop as f64 / sr)));
        let mut energy: Vec<T> = rms.iter().map(|&r| r * r).collect();
        energy.sort_by(|a, b| a.partial_cmp(b).expect("finite energy"));
        fv.set(index::ENERGY_P90, percentile_sorted(&energy, 0.9));

        // spectral shape
        let total_w = spectral.iter().fold(T::zero(), |a, f| a + f.weight);
        let pool = |get: &dyn Fn(&FrameSpectral<T>) -> T, silent: T| {
            if total_w <= T::zero() {
                silent
            } else {
                spectral.iter().fold(T::zero(), |a, f| a + f.weight * get(f)) / total_w
            }
        };
        fv.set(index::SPECTRAL_BANDWIDTH, pool(&|f| f.bandwidth, T::zero()));
        fv.set(index::ROLLOFF_85, pool(&|f| f.rolloff_85, T::zero()));
        fv.set(index::ROLLOFF_95, pool(&|f| f.rolloff_95, T::zero()));
        fv.set(
            index::SPECTRAL_FLATNESS,
            pool(&|f| f.flatness, T::one()).max(T::zero()).min(T::one()),
        );
        fv.set(index::SPECTRAL_CONTRAST, pool(&|f| f.contrast, T::zero()));
        fv.set(index::SPECTRAL_CENTROID, pool(&|f| f.centroid, T::zero()));
        for c in 0..12 {
            fv.set(index::CHROMA + c, pool(&|f| f.chroma[c], T::zero()));
        }

        // pitch
        let voiced_pitch: Vec<T> = pitch
            .iter()
            .zip(&voiced)
            .filter(|(_, &v)| v)
            .map(|(&(p, _), _)| p)
            .collect();
        let voiced_conf: Vec<T> = pitch
            .iter()
            .zip(&voiced)
            .filter(|(_, &v)| v)
            .map(|(&(_, c), _)| c)
            .collect();
        if !voiced_pitch.is_empty() {
            fv.set(index::PITCH_MEDIAN, median(&voiced_pitch));
            fv.set(index::PITCH_STD, std_dev(&voiced_pitch));
            fv.set(index::HNR, hnr_db(median(&voiced_conf)));
        }

        fv.set(index::MOD_ENERGY_4_12, modulation_energy(&rms, sr / hop as f64));

        // cepstra
        let db_floor = log_mel
            .iter()
            .flatten()
            .fold(T::neg_infinity(), |a, &v| a.max(v))
            - T::lit(self.cfg.top_db);
        let mfcc: Vec<Vec<T>> = log_mel
            .iter()
            .map(|frame| {
                let clipped: Vec<T> = frame.iter().map(|&v| v.max(db_floor)).collect();
                self.dct
                    .iter()
                    .map(|basis| basis.iter().zip(&clipped).fold(T::zero(), |a, (&b, &v)| a + b * v))
                    .collect()
            })
            .collect();
        let d1 = delta(&mfcc, self.cfg.delta_width);
        let d2 = delta(&d1, self.cfg.delta_width);
        for (offset, rows) in [(index::MFCC, &mfcc), (index::DELTA_MFCC, &d1), (index::DELTA2_MFCC, &d2)] {
            for k in 0..N_MFCC {
                let col: Vec<T> = rows.iter().map(|r| r[k]).collect();
                fv.set(offset + k, crate::num::mean(&col));
            }
        }

        fv.validate()?;
        Ok(fv)
    }

    fn frame_spectral(&self, power: &[T]) -> FrameSpectral<T> {
        let weight = power.iter().fold(T::zero(), |a, &p| a + p);
        let mut out = FrameSpectral {
            weight,
            flatness: T::one(),
            ..FrameSpectral::default()
        };
        if weight <= T::zero() {
            return out;
        }
        let mag: Vec<T> = power.iter().map(|p| p.sqrt()).collect();
        let mag_sum = mag.iter().fold(T::zero(), |a, &m| a + m);
        let centroid = mag
            .iter()
            .enumerate()
            .fold(T::zero(), |a, (k, &m)| a + self.bin_hz(k) * m)
            / mag_sum;
        let spread = mag.iter().enumerate().fold(T::zero(), |a, (k, &m)| {
            let d = self.bin_hz(k) - centroid;
            a + d * d * m
        }) / mag_sum;
        out.centroid = centroid;
        out.bandwidth = spread.sqrt();

        let rolloff = |q: f64| {
            let target = T::lit(q) * mag_sum;
            let mut acc = T::zero();
            for (k, &m) in mag.iter().enumerate() {
                acc = acc + m;
                if acc >= target {
                    return self.bin_hz(k);
                }
            }
            self.bin_hz(mag.len() - 1)
        };
        out.rolloff_85 = rolloff(0.85);
        out.rolloff_95 = rolloff(0.95);

        // Flatness on power with a floor relative to the frame peak.
        let peak = power.iter().fold(T::zero(), |a, &p| a.max(p));
        let floor = peak * T::lit(1e-10);
        let n = T::from_usize_lossy(power.len());
        let log_mean = power.iter().fold(T::zero(), |a, &p| a + p.max(floor).ln()) / n;
        let arith = power.iter().fold(T::zero(), |a, &p| a + p.max(floor)) / n;
        out.flatness = (log_mean.exp() / arith).min(T::one());

        // Octave-band peak/valley contrast, averaged over bands.
        let mag_floor = mag.iter().fold(T::zero(), |a, &m| a.max(m)) * T::lit(1e-10);
        let nyquist = self.sample_rate as f64 / 2.0;
        let mut contrast_sum = T::zero();
        let mut bands = 0usize;
        for pair in CONTRAST_EDGES_HZ.windows(2) {
            if pair[0] >= nyquist {
                break;
            }
            let mut band: Vec<T> = mag
                .iter()
                .enumerate()
                .filter(|(k, _)| {
                    let f = self.bin_hz(*k).as_f64();
                    f >= pair[0] && f < pair[1].min(nyquist + 1.0)
                })
                .map(|(_, &m)| m)
                .collect();
            if band.is_empty() {
                continue;
            }
            band.sort_by(|a, b| a.partial_cmp(b).expect("finite magnitude"));
            let q = ((band.len() as f64 * 0.02).round() as usize).max(1);
            let qn = T::from_usize_lossy(q);
            let valley = band[..q].iter().fold(T::zero(), |a, &m| a + m) / qn;
            let peak = band[band.len() - q..].iter().fold(T::zero(), |a, &m| a + m) / qn;
            contrast_sum = contrast_sum
                + T::lit(20.0) * (peak.max(mag_floor) / valley.max(mag_floor)).log10();
            bands += 1;
        }
        if bands > 0 {
            out.contrast = contrast_sum / T::from_usize_lossy(bands);
        }

        // Pitch-class energy, normalised to a unit maximum.
        let mut chroma = [T::zero(); 12];
        for (k, &p) in power.iter().enumerate().skip(1) {
            let f = self.bin_hz(k).as_f64();
            if f < 27.5 {
                continue;
            }
            let semis = (12.0 * (f / 440.0).log2()).round() as i64 + 9;
            chroma[semis.rem_euclid(12) as usize] = chroma[semis.rem_euclid(12) as usize] + p;
        }
        let top = chroma.iter().fold(T::zero(), |a, &c| a.max(c));
        if top > T::zero() {
            for c in chroma.iter_mut() {
                *c = *c / top;
            }
        }
        out.chroma = chroma;
        out
    }

    fn mel_energies(&self, power: &[T]) -> Vec<T> {
        let amin = T::lit(1e-10);
        self.mel
            .iter()
            .map(|filter| {
                let e = filter.iter().zip(power).fold(T::zero(), |a, (&w, &p)| a + w * p);
                T::lit(10.0) * e.max(amin).log10()
            })
            .collect()
    }

    /// `(pitch_hz, confidence)` from the normalised autocorrelation.
    fn frame_pitch(&self, frame: &[T]) -> (T, T) {
        let sr = self.sample_rate as f64;
        let min_lag = (sr / self.cfg.pitch_max_hz).floor().max(1.0) as usize;
        let max_lag = (sr / self.cfg.pitch_min_hz).ceil() as usize;
        if frame.len() < 2 * min_lag + 2 {
            return (T::zero(), T::zero());
        }
        let mean = crate::num::mean(frame);
        let centred: Vec<T> = frame.iter().map(|&v| v - mean).collect();
        let r = self.spectra.normalized_autocorr(&centred, max_lag + 1);
        let hi = max_lag.min(r.len().saturating_sub(2));
        if hi <= min_lag {
            return (T::zero(), T::zero());
        }
        let (best_lag, best) = (min_lag..=hi)
            .map(|l| (l, r[l]))
            .fold((min_lag, T::neg_infinity()), |acc, c| if c.1 > acc.1 { c } else { acc });
        if best <= T::zero() {
            return (T::zero(), T::zero());
        }
        // Smallest interior peak close to the best one avoids octave errors.
        let lag = (min_lag.max(1)..=hi)
            .find(|&l| r[l] >= r[l - 1] && r[l] >= r[l + 1] && r[l] >= T::lit(0.9) * best)
            .unwrap_or(best_lag);
        let (a, b, c) = (r[lag - 1], r[lag], r[lag + 1]);
        let denom = a - T::lit(2.0) * b + c;
        let shift = if denom.abs() > T::epsilon() {
            (T::lit(0.5) * (a - c) / denom).max(-T::lit(0.5)).min(T::lit(0.5))
        } else {
            T::zero()
        };
        let refined = T::from_usize_lossy(lag) + shift;
        (T::lit(sr) / refined, b.max(T::zero()).min(T::one()))
    }
}

/// Convenience wrapper building a one-off extractor for the clip's rate.
pub fn extract_features<T: Scalar>(clip: &AudioClip<T>, cfg: &FeatureConfig) -> Result<FeatureVector<T>> {
    FeatureExtractor::new(cfg.clone(), clip.sample_rate).extract(clip)
}

/// Energy-weighted mean sample time over the clip length; 0.5 for silence.
fn temporal_centroid<T: Scalar>(x: &[T]) -> T {
    let (mut num, mut den) = (T::zero(), T::zero());
    for (i, &v) in x.iter().enumerate() {
        let e = v * v;
        num = num + e * (T::from_usize_lossy(i) + T::lit(0.5));
        den = den + e;
    }
    if den <= T::zero() {
        T::lit(0.5)
    } else {
        num / den / T::from_usize_lossy(x.len())
    }
}

/// Least-squares slope of `y` against time with step `dt`.
fn slope<T: Scalar>(y: &[T], dt: T) -> T {
    let n = y.len();
    if n < 2 {
        return T::zero();
    }
    let tm = T::lit((n - 1) as f64 / 2.0);
    let ym = crate::num::mean(y);
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (i, &v) in y.iter().enumerate() {
        let dx = T::from_usize_lossy(i) - tm;
        sxy = sxy + dx * (v - ym);
        sxx = sxx + dx * dx;
    }
    sxy / sxx / dt
}

/// Fraction of the RMS envelope's spectral energy (DC excluded) in 4–12 Hz.
fn modulation_energy<T: Scalar>(rms: &[T], frame_rate: f64) -> T {
    let n = rms.len();
    if n < 2 {
        return T::zero();
    }
    let m = crate::num::mean(rms);
    let centred: Vec<T> = rms.iter().map(|&r| r - m).collect();
    let p = dft_power(&centred);
    let (mut band, mut total) = (T::zero(), T::zero());
    for (k, &e) in p.iter().enumerate().skip(1) {
        let f = k as f64 * frame_rate / n as f64;
        total = total + e;
        if (4.0..=12.0).contains(&f) {
            band = band + e;
        }
    }
    if total <= T::zero() {
        T::zero()
    } else {
        band / total
    }
}

fn hnr_db<T: Scalar>(r: T) -> T {
    let r = r.as_f64().clamp(1e-12, 1.0 - 1e-12);
    T::lit((10.0 * (r / (1.0 - r)).log10()).clamp(-20.0, 40.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::ANALYSIS_RATE;
    use rand::{Rng, SeedableRng};

    fn tone(freq: f64, secs: f64, amp: f64) -> AudioClip<f64> {
        let n = (secs * ANALYSIS_RATE as f64).round() as usize;
        let s = (0..n)
            .map(|i| amp * (2.0 * std::f64::consts::PI * freq * i as f64 / ANALYSIS_RATE as f64).sin())
            .collect();
        AudioClip::from_samples("t", s, ANALYSIS_RATE)
    }

    fn noise(secs: f64, amp: f64, seed: u64) -> AudioClip<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = (secs * ANALYSIS_RATE as f64).round() as usize;
        let s = (0..n).map(|_| amp * rng.random_range(-1.0..1.0)).collect();
        AudioClip::from_samples("n", s, ANALYSIS_RATE)
    }

    #[test]
    fn pure_tone() {
        let fv = extract_features(&tone(440.0, 1.0, 0.5), &FeatureConfig::default()).unwrap();
        let c = fv[index::SPECTRAL_CENTROID];
        assert!((c - 440.0).abs() <= 25.0, "centroid {c}");
        assert!(fv[index::VOICED_RATIO] >= 0.9);
        assert!((fv[index::PITCH_MEDIAN] - 440.0).abs() < 5.0, "pitch {}", fv[index::PITCH_MEDIAN]);
        assert_eq!(fv[index::BURST_COUNT], 1.0);
        assert!((fv[index::TEMPORAL_CENTROID] - 0.5).abs() < 0.01);
        // A is pitch class 9 (C = 0) → chroma_10
        assert_eq!(fv[index::CHROMA + 9], 1.0);
        assert!(fv[index::HNR] > 20.0);
    }

    #[test]
    fn digital_silence() {
        let clip = AudioClip::from_samples("s", vec![0.0; 22050], ANALYSIS_RATE);
        let fv = extract_features(&clip, &FeatureConfig::default()).unwrap();
        assert_eq!(fv[index::RMS_MEAN], 0.0);
        assert_eq!(fv[index::ENERGY_P90], 0.0);
        assert_eq!(fv[index::BURST_COUNT], 0.0);
        assert_eq!(fv[index::VOICED_RATIO], 0.0);
        assert_eq!(fv[index::SPECTRAL_FLATNESS], 1.0);
        assert_eq!(fv[index::PITCH_MEDIAN], 0.0);
        assert_eq!(fv[index::HNR], 0.0);
    }

    #[test]
    fn white_noise_is_flat() {
        let fv = extract_features(&noise(1.0, 0.3, 7), &FeatureConfig::default()).unwrap();
        assert!(fv[index::SPECTRAL_FLATNESS] > 0.5, "{}", fv[index::SPECTRAL_FLATNESS]);
        assert!(fv[index::VOICED_RATIO] < 0.2);
    }

    #[test]
    fn too_short_clip_is_rejected() {
        let clip = AudioClip::from_samples("s", vec![0.1; 1000], ANALYSIS_RATE);
        assert!(extract_features(&clip, &FeatureConfig::default()).is_err());
    }

    #[test]
    fn f32_agrees_with_f64() {
        let c64 = tone(300.0, 0.5, 0.4);
        let c32 = AudioClip::from_samples("t", c64.samples.iter().map(|&v| v as f32).collect(), ANALYSIS_RATE);
        let a = extract_features(&c64, &FeatureConfig::default()).unwrap();
        let b = extract_features(&c32, &FeatureConfig::default()).unwrap();
        let rel = (a[index::SPECTRAL_CENTROID] - b[index::SPECTRAL_CENTROID] as f64).abs() / a[index::SPECTRAL_CENTROID];
        assert!(rel < 1e-3);
    }

    #[test]
    fn modulated_noise_has_modulation_energy() {
        let base = noise(2.0, 0.5, 3);
        let s: Vec<f64> = base
            .samples
            .iter()
            .enumerate()
            .map(|(i, &v)| v * (0.5 + 0.5 * (2.0 * std::f64::consts::PI * 6.0 * i as f64 / 22050.0).sin()))
            .collect();
        let clip = AudioClip::from_samples("m", s, ANALYSIS_RATE);
        let fv = extract_features(&clip, &FeatureConfig::default()).unwrap();
        let steady = extract_features(&base, &FeatureConfig::default()).unwrap();
        assert!(fv[index::MOD_ENERGY_4_12] > 0.5, "{}", fv[index::MOD_ENERGY_4_12]);
        assert!(fv[index::MOD_ENERGY_4_12] > steady[index::MOD_ENERGY_4_12]);
    }

    #[test]
    fn slope_sign() {
        assert!(slope(&[0.0, 1.0, 2.0], 0.5) > 0.0);
        assert!((slope(&[0.0, 1.0, 2.0], 0.5) - 2.0f64).abs() < 1e-12);
        assert_eq!(slope(&[3.0], 1.0), 0.0);
    }
}
