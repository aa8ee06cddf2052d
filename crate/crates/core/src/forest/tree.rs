//! CART classification trees with Gini impurity.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Class;
use crate::num::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node<T> {
    Split {
        feature: usize,
        /// Samples with `x[feature] <= threshold` go left.
        threshold: T,
        left: usize,
        right: usize,
    },
    Leaf {
        /// Training counts `[other, laughter]` that reached the leaf.
        counts: [u32; 2],
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree<T> {
    pub nodes: Vec<Node<T>>,
}

pub(crate) struct TreeParams {
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub features_per_split: usize,
}

fn gini(counts: [usize; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p = counts[1] as f64 / n;
    2.0 * p * (1.0 - p)
}

struct SplitChoice<T> {
    feature: usize,
    threshold: T,
    impurity: f64,
}

impl<T: Scalar> Tree<T> {
    /// Grows a tree on the rows listed in `sample` (duplicates allowed).
    pub(crate) fn fit<R: Rng>(x: &[Vec<T>], y: &[Class], sample: Vec<usize>, params: &TreeParams, rng: &mut R) -> Self {
        let mut tree = Tree { nodes: Vec::new() };
        let n_features = x.first().map_or(0, Vec::len);
        tree.grow(x, y, sample, 0, n_features, params, rng);
        tree
    }

    #[allow(clippy::too_many_arguments)]
    fn grow<R: Rng>(
        &mut self,
        x: &[Vec<T>],
        y: &[Class],
        rows: Vec<usize>,
        depth: usize,
        n_features: usize,
        params: &TreeParams,
        rng: &mut R,
    ) -> usize {
        let mut counts = [0usize; 2];
        for &r in &rows {
            counts[y[r] as usize] += 1;
        }
        let id = self.nodes.len();
        let leaf = Node::Leaf {
            counts: [counts[0] as u32, counts[1] as u32],
        };
        self.nodes.push(leaf.clone());

        let pure = counts[0] == 0 || counts[1] == 0;
        if pure || depth >= params.max_depth || rows.len() < params.min_samples_split {
            return id;
        }
        let Some(choice) = best_split(x, y, &rows, n_features, params.features_per_split, rng) else {
            return id;
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            rows.iter().partition(|&&r| x[r][choice.feature] <= choice.threshold);
        debug_assert!(!left_rows.is_empty() && !right_rows.is_empty());
        debug_assert!(choice.impurity <= gini(counts) + 1e-12);

        let left = self.grow(x, y, left_rows, depth + 1, n_features, params, rng);
        let right = self.grow(x, y, right_rows, depth + 1, n_features, params, rng);
        self.nodes[id] = Node::Split {
            feature: choice.feature,
            threshold: choice.threshold,
            left,
            right,
        };
        id
    }

    pub fn leaf_counts(&self, row: &[T]) -> [u32; 2] {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { counts } => return *counts,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if row[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    /// Laughter frequency of the leaf reached by `row`.
    pub fn predict_proba(&self, row: &[T]) -> f64 {
        let c = self.leaf_counts(row);
        let n = c[0] + c[1];
        if n == 0 {
            0.0
        } else {
            c[1] as f64 / n as f64
        }
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn walk<T>(nodes: &[Node<T>], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        if self.nodes.is_empty() {
            0
        } else {
            walk(&self.nodes, 0)
        }
    }

    pub fn split_features(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Split { feature, .. } => Some(*feature),
            Node::Leaf { .. } => None,
        })
    }
}

/// Examines features in random order until `mtry` non-constant ones have
/// been scored (or all are exhausted) and keeps the lowest weighted Gini.
fn best_split<T: Scalar, R: Rng>(
    x: &[Vec<T>],
    y: &[Class],
    rows: &[usize],
    n_features: usize,
    mtry: usize,
    rng: &mut R,
) -> Option<SplitChoice<T>> {
    let mut order: Vec<usize> = (0..n_features).collect();
    order.shuffle(rng);
    let n = rows.len();
    let mut total = [0usize; 2];
    for &r in rows {
        total[y[r] as usize] += 1;
    }

    let mut best: Option<SplitChoice<T>> = None;
    let mut scored = 0;
    let mut column: Vec<(T, Class)> = Vec::with_capacity(n);
    for feature in order {
        if scored >= mtry {
            break;
        }
        column.clear();
        column.extend(rows.iter().map(|&r| (x[r][feature], y[r])));
        column.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("features must not be NaN"));
        if column[0].0 == column[n - 1].0 {
            continue;
        }
        scored += 1;
        let mut left = [0usize; 2];
        for i in 0..n - 1 {
            left[column[i].1 as usize] += 1;
            let (v, next) = (column[i].0, column[i + 1].0);
            if v == next {
                continue;
            }
            let right = [total[0] - left[0], total[1] - left[1]];
            let nl = (i + 1) as f64;
            let impurity = (nl * gini(left) + (n as f64 - nl) * gini(right)) / n as f64;
            if best.as_ref().is_none_or(|b| impurity < b.impurity) {
                let mut threshold = (v + next) / T::lit(2.0);
                if threshold >= next {
                    threshold = v;
                }
                best = Some(SplitChoice {
                    feature,
                    threshold,
                    impurity,
                });
            }
        }
    }
    best
}
