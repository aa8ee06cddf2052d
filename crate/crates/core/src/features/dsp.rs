//! Framing, spectra and the small transforms behind the feature vector.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::num::Scalar;

/// Periodic Hann window.
pub fn hann<T: Scalar>(n: usize) -> Vec<T> {
    let two_pi = T::lit(2.0) * T::PI();
    let nf = T::from_usize_lossy(n);
    (0..n)
        .map(|i| T::lit(0.5) - T::lit(0.5) * (two_pi * T::from_usize_lossy(i) / nf).cos())
        .collect()
}

/// Frame start offsets. Only whole frames are used; a signal shorter than one
/// frame yields a single zero-padded frame.
pub fn frame_starts(n_samples: usize, frame_len: usize, hop: usize) -> Vec<usize> {
    if n_samples <= frame_len {
        return vec![0];
    }
    (0..=(n_samples - frame_len) / hop).map(|f| f * hop).collect()
}

fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Triangular filters (HTK mel scale) over `n_fft / 2 + 1` power bins,
/// spanning `[0, sample_rate / 2]`.
pub fn mel_filterbank<T: Scalar>(n_mels: usize, n_fft: usize, sample_rate: f64) -> Vec<Vec<T>> {
    let n_bins = n_fft / 2 + 1;
    let top = hz_to_mel(sample_rate / 2.0);
    let edges: Vec<f64> = (0..n_mels + 2)
        .map(|i| mel_to_hz(top * i as f64 / (n_mels + 1) as f64))
        .collect();
    (0..n_mels)
        .map(|m| {
            let (lo, mid, hi) = (edges[m], edges[m + 1], edges[m + 2]);
            (0..n_bins)
                .map(|k| {
                    let f = k as f64 * sample_rate / n_fft as f64;
                    let w = if f <= lo || f >= hi {
                        0.0
                    } else if f <= mid {
                        (f - lo) / (mid - lo)
                    } else {
                        (hi - f) / (hi - mid)
                    };
                    T::lit(w)
                })
                .collect()
        })
        .collect()
}

/// Orthonormal DCT-II basis, `n_out` rows of length `n_in`.
pub fn dct_matrix<T: Scalar>(n_out: usize, n_in: usize) -> Vec<Vec<T>> {
    let n = n_in as f64;
    (0..n_out)
        .map(|k| {
            let scale = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
            (0..n_in)
                .map(|m| {
                    T::lit(scale * (std::f64::consts::PI * k as f64 * (m as f64 + 0.5) / n).cos())
                })
                .collect()
        })
        .collect()
}

/// Regression delta over a `width`-frame window (odd, ≥ 3) with edge
/// replication. `rows` is frame-major.
pub fn delta<T: Scalar>(rows: &[Vec<T>], width: usize) -> Vec<Vec<T>> {
    let half = (width / 2).max(1) as isize;
    let n = rows.len() as isize;
    let denom = T::lit(2.0 * (1..=half).map(|k| (k * k) as f64).sum::<f64>());
    let at = |t: isize| &rows[t.clamp(0, n - 1) as usize];
    (0..n)
        .map(|t| {
            let dim = rows[t as usize].len();
            (0..dim)
                .map(|d| {
                    let mut acc = T::zero();
                    for k in 1..=half {
                        acc = acc + T::lit(k as f64) * (at(t + k)[d] - at(t - k)[d]);
                    }
                    acc / denom
                })
                .collect()
        })
        .collect()
}

/// Reusable forward FFTs for the spectrum and the autocorrelation.
pub struct Spectra<T: Scalar> {
    n_fft: usize,
    fft: Arc<dyn Fft<T>>,
    ac_len: usize,
    ac_fwd: Arc<dyn Fft<T>>,
    ac_inv: Arc<dyn Fft<T>>,
}

impl<T: Scalar> Spectra<T> {
    pub fn new(n_fft: usize) -> Self {
        let mut planner = FftPlanner::new();
        let ac_len = (2 * n_fft).next_power_of_two();
        Self {
            n_fft,
            fft: planner.plan_fft_forward(n_fft),
            ac_len,
            ac_fwd: planner.plan_fft_forward(ac_len),
            ac_inv: planner.plan_fft_inverse(ac_len),
        }
    }

    /// One-sided power spectrum of an already windowed frame.
    pub fn power(&self, windowed: &[T]) -> Vec<T> {
        let mut buf: Vec<Complex<T>> = (0..self.n_fft)
            .map(|i| Complex::new(windowed.get(i).copied().unwrap_or_else(T::zero), T::zero()))
            .collect();
        self.fft.process(&mut buf);
        buf[..self.n_fft / 2 + 1].iter().map(|c| c.norm_sqr()).collect()
    }

    /// Normalised autocorrelation `r(τ)` for `τ ∈ [0, max_lag]`:
    /// `Σ x[n]x[n+τ] / sqrt(Σ_head x² · Σ_tail x²)`, computed through the FFT
    /// with prefix sums for the energies.
    pub fn normalized_autocorr(&self, frame: &[T], max_lag: usize) -> Vec<T> {
        let n = frame.len();
        let mut buf: Vec<Complex<T>> = (0..self.ac_len)
            .map(|i| Complex::new(frame.get(i).copied().unwrap_or_else(T::zero), T::zero()))
            .collect();
        self.ac_fwd.process(&mut buf);
        for c in buf.iter_mut() {
            *c = Complex::new(c.norm_sqr(), T::zero());
        }
        self.ac_inv.process(&mut buf);
        let scale = T::from_usize_lossy(self.ac_len);

        let mut prefix = Vec::with_capacity(n + 1);
        prefix.push(T::zero());
        for &x in frame {
            let last = *prefix.last().unwrap();
            prefix.push(last + x * x);
        }
        let total = prefix[n];
        (0..=max_lag.min(n.saturating_sub(1)))
            .map(|lag| {
                let head = prefix[n - lag];
                let tail = total - prefix[lag];
                let denom = (head * tail).sqrt();
                if denom <= T::zero() {
                    T::zero()
                } else {
                    (buf[lag].re / scale / denom).max(-T::one()).min(T::one())
                }
            })
            .collect()
    }
}

/// Real DFT power of a short sequence (used on envelopes).
pub fn dft_power<T: Scalar>(x: &[T]) -> Vec<T> {
    if x.is_empty() {
        return Vec::new();
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(x.len());
    let mut buf: Vec<Complex<T>> = x.iter().map(|&v| Complex::new(v, T::zero())).collect();
    fft.process(&mut buf);
    buf[..x.len() / 2 + 1].iter().map(|c| c.norm_sqr()).collect()
}
