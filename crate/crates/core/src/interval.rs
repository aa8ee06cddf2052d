//! Closed time intervals and intersection-over-union.

use serde::{Deserialize, Serialize};

use crate::num::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval<T> {
    pub start: T,
    pub end: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(start: T, end: T) -> Self {
        Self { start, end }
    }

    pub fn len(&self) -> T {
        (self.end - self.start).max(T::zero())
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    /// Intersection, `None` when the intervals share no positive-length span.
    pub fn intersection(&self, other: &Self) -> Option<Self> {
        let start = self.start.max(other.start);
        let end = self.end.min(other.end);
        (end > start).then_some(Self { start, end })
    }

    pub fn overlap(&self, other: &Self) -> T {
        self.intersection(other).map_or(T::zero(), |i| i.len())
    }

    pub fn contains_point(&self, t: T) -> bool {
        self.start <= t && t <= self.end
    }

    pub fn contains(&self, other: &Self) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

/// `|a ∩ b| / |a ∪ b|`; zero for disjoint or degenerate inputs.
pub fn iou<T: Scalar>(a: &Interval<T>, b: &Interval<T>) -> T {
    let inter = a.overlap(b);
    if inter <= T::zero() {
        return T::zero();
    }
    let union = a.len() + b.len() - inter;
    if union <= T::zero() {
        return T::zero();
    }
    (inter / union).min(T::one())
}
