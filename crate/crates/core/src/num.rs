//! Scalar abstraction shared by the numeric kernels.
//!
//! Interval arithmetic, the DSP feature extractor and the random forest are
//! written against [`Scalar`] so they run in either `f32` or `f64`. The
//! on-disk record types stay in `f64`; see the aliases at the crate root.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;
use serde::de::DeserializeOwned;
use serde::Serialize;

pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + FftNum
    + Default
    + Display
    + Debug
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Every `f64` is representable (possibly
    /// rounded) in both supported types, so this never fails.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal fits the scalar type")
    }

    #[inline]
    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("usize fits the scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Linear-interpolated percentile of an already sorted slice, `q` in `[0, 1]`.
/// Returns zero for an empty slice.
pub fn percentile_sorted<T: Scalar>(sorted: &[T], q: f64) -> T {
    match sorted.len() {
        0 => T::zero(),
        1 => sorted[0],
        n => {
            let pos = q.clamp(0.0, 1.0) * (n - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            let frac = T::lit(pos - lo as f64);
            sorted[lo] + (sorted[hi] - sorted[lo]) * frac
        }
    }
}

/// Median with the even-length convention of averaging the two middle values.
pub fn median<T: Scalar>(values: &[T]) -> T {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("median input must not contain NaN"));
    percentile_sorted(&v, 0.5)
}

pub fn mean<T: Scalar>(values: &[T]) -> T {
    if values.is_empty() {
        return T::zero();
    }
    values.iter().fold(T::zero(), |acc, &v| acc + v) / T::from_usize_lossy(values.len())
}

/// Population standard deviation.
pub fn std_dev<T: Scalar>(values: &[T]) -> T {
    if values.is_empty() {
        return T::zero();
    }
    let m = mean(values);
    let var = values
        .iter()
        .fold(T::zero(), |acc, &v| acc + (v - m) * (v - m))
        / T::from_usize_lossy(values.len());
    var.sqrt()
}
