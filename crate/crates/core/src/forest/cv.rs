//! Repeated stratified hold-out evaluation with percentile intervals.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{derive_seed, ForestConfig, ForestModel};
use super::Class;
use crate::error::{Error, Result};
use crate::eval::{ClassScores, Confusion, MacroScores};
use crate::num::{percentile_sorted, Scalar};

/// Mean and 95 % percentile interval of one metric across rounds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Interval95 {
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Interval95 {
    fn of(values: &[f64]) -> Self {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Self {
            mean: v.iter().sum::<f64>() / v.len().max(1) as f64,
            lo: percentile_sorted(&v, 0.025),
            hi: percentile_sorted(&v, 0.975),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricIntervals {
    pub precision: Interval95,
    pub recall: Interval95,
    pub f1: Interval95,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub iterations: usize,
    pub holdout_fraction: f64,
    pub laughter: MetricIntervals,
    pub other: MetricIntervals,
    #[serde(rename = "macro")]
    pub macro_avg: MetricIntervals,
}

/// Scores of one hold-out round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundScores {
    pub laughter: ClassScores,
    pub other: ClassScores,
    #[serde(rename = "macro")]
    pub macro_avg: MacroScores,
}

/// Per-class scores of `predicted` against `truth`.
pub fn binary_scores(truth: &[Class], predicted: &[Class]) -> RoundScores {
    let mut pos = Confusion::default();
    let mut neg = Confusion::default();
    for (&t, &p) in truth.iter().zip(predicted) {
        match (t, p) {
            (Class::Laughter, Class::Laughter) => pos.tp += 1,
            (Class::Other, Class::Other) => neg.tp += 1,
            (Class::Other, Class::Laughter) => {
                pos.fp += 1;
                neg.fn_ += 1;
            }
            (Class::Laughter, Class::Other) => {
                pos.fn_ += 1;
                neg.fp += 1;
            }
        }
    }
    let (laughter, other) = (pos.scores(), neg.scores());
    RoundScores {
        laughter,
        other,
        macro_avg: MacroScores::of(&[laughter, other]),
    }
}

/// Stratified split: `round(fraction × n_c)` (at least one) rows of every
/// class go to the hold-out side.
pub fn stratified_split(y: &[Class], fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for class in [Class::Other, Class::Laughter] {
        let mut idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        idx.shuffle(&mut rng);
        let k = ((idx.len() as f64 * fraction).round() as usize).max(1).min(idx.len());
        test.extend_from_slice(&idx[..k]);
        train.extend_from_slice(&idx[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// Trains on one split and scores the hold-out rows.
pub fn holdout_round<T: Scalar>(
    x: &[Vec<T>],
    y: &[Class],
    feature_order: &[String],
    cfg: &ForestConfig,
    round: u64,
) -> Result<RoundScores> {
    let (train, test) = stratified_split(y, cfg.holdout_fraction, derive_seed(cfg.seed, u64::MAX - round));
    let tx: Vec<Vec<T>> = train.iter().map(|&i| x[i].clone()).collect();
    let ty: Vec<Class> = train.iter().map(|&i| y[i]).collect();
    let round_cfg = ForestConfig {
        seed: derive_seed(cfg.seed, round),
        ..cfg.clone()
    };
    let model = ForestModel::train(&tx, &ty, feature_order.to_vec(), &round_cfg)?;
    let truth: Vec<Class> = test.iter().map(|&i| y[i]).collect();
    let predicted = test
        .iter()
        .map(|&i| model.predict(&x[i]).map(|(c, _)| c))
        .collect::<Result<Vec<_>>>()?;
    Ok(binary_scores(&truth, &predicted))
}

pub fn evaluate_cv<T: Scalar>(
    x: &[Vec<T>],
    y: &[Class],
    feature_order: &[String],
    cfg: &ForestConfig,
    iterations: usize,
) -> Result<CvReport> {
    cfg.validate()?;
    if iterations == 0 {
        return Err(Error::Model("at least one iteration is required".into()));
    }
    for class in [Class::Other, Class::Laughter] {
        let n = y.iter().filter(|&&c| c == class).count();
        if n < 2 {
            return Err(Error::Model(format!(
                "class {class:?} has {n} examples; a train/validation split needs at least 2"
            )));
        }
    }
    let rounds = (0..iterations as u64)
        .into_par_iter()
        .map(|r| holdout_round(x, y, feature_order, cfg, r))
        .collect::<Result<Vec<_>>>()?;

    let collect = |get: &dyn Fn(&RoundScores) -> (f64, f64, f64)| {
        let (p, (r, f)): (Vec<f64>, (Vec<f64>, Vec<f64>)) = rounds
            .iter()
            .map(|s| {
                let (p, r, f) = get(s);
                (p, (r, f))
            })
            .unzip();
        MetricIntervals {
            precision: Interval95::of(&p),
            recall: Interval95::of(&r),
            f1: Interval95::of(&f),
        }
    };
    Ok(CvReport {
        iterations,
        holdout_fraction: cfg.holdout_fraction,
        laughter: collect(&|s| (s.laughter.precision, s.laughter.recall, s.laughter.f1)),
        other: collect(&|s| (s.other.precision, s.other.recall, s.other.f1)),
        macro_avg: collect(&|s| (s.macro_avg.precision, s.macro_avg.recall, s.macro_avg.f1)),
    })
}
