use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{Tree, TreeParams};
use super::Class;
use crate::error::{Error, Result};
use crate::num::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeaturesPerSplit {
    /// `⌊√n_features⌋`, at least one.
    Sqrt,
    All,
    Fixed(usize),
}

impl FeaturesPerSplit {
    pub fn resolve(self, n_features: usize) -> usize {
        let k = match self {
            FeaturesPerSplit::Sqrt => (n_features as f64).sqrt().floor() as usize,
            FeaturesPerSplit::All => n_features,
            FeaturesPerSplit::Fixed(k) => k,
        };
        k.clamp(1, n_features.max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub n_estimators: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub features_per_split: FeaturesPerSplit,
    pub seed: u64,
    pub holdout_fraction: f64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_estimators: 50,
            max_depth: 13,
            min_samples_split: 2,
            features_per_split: FeaturesPerSplit::Sqrt,
            seed: 0,
            holdout_fraction: 0.15,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_estimators < 1 {
            return Err(Error::Model("n_estimators must be at least 1".into()));
        }
        if self.max_depth < 1 {
            return Err(Error::Model("max_depth must be at least 1".into()));
        }
        if self.min_samples_split < 2 {
            return Err(Error::Model("min_samples_split must be at least 2".into()));
        }
        if !(self.holdout_fraction > 0.0 && self.holdout_fraction < 1.0) {
            return Err(Error::Model("holdout_fraction must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Mixes a base seed with a stream index (splitmix64 finaliser), so every
/// tree and every CV round has its own reproducible generator.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel<T> {
    pub feature_order: Vec<String>,
    pub config: ForestConfig,
    pub trees: Vec<Tree<T>>,
}

impl<T: Scalar> ForestModel<T> {
    /// Bootstrap-aggregated Gini trees. Tree `i` draws from its own seed
    /// stream, so the result does not depend on the thread count.
    pub fn train(x: &[Vec<T>], y: &[Class], feature_order: Vec<String>, cfg: &ForestConfig) -> Result<Self> {
        cfg.validate()?;
        if x.len() != y.len() {
            return Err(Error::Model(format!("{} rows but {} labels", x.len(), y.len())));
        }
        if x.len() < cfg.min_samples_split {
            return Err(Error::Model(format!(
                "{} examples is fewer than min_samples_split = {}",
                x.len(),
                cfg.min_samples_split
            )));
        }
        if !(y.contains(&Class::Laughter) && y.contains(&Class::Other)) {
            return Err(Error::Model("training data must contain both classes".into()));
        }
        let dim = feature_order.len();
        if let Some((i, row)) = x.iter().enumerate().find(|(_, r)| r.len() != dim) {
            return Err(Error::Model(format!("row {i} has {} features, expected {dim}", row.len())));
        }
        if x.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Model("training features must be finite".into()));
        }

        let params = TreeParams {
            max_depth: cfg.max_depth,
            min_samples_split: cfg.min_samples_split,
            features_per_split: cfg.features_per_split.resolve(dim),
        };
        let n = x.len();
        let trees = (0..cfg.n_estimators)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, t as u64));
                let sample: Vec<usize> = (0..n).map(|_| rand::Rng::random_range(&mut rng, 0..n)).collect();
                Tree::fit(x, y, sample, &params, &mut rng)
            })
            .collect();
        Ok(Self {
            feature_order,
            config: cfg.clone(),
            trees,
        })
    }

    fn check_dim(&self, row: &[T]) -> Result<()> {
        if row.len() != self.feature_order.len() {
            return Err(Error::Model(format!(
                "vector has {} features, model expects {}",
                row.len(),
                self.feature_order.len()
            )));
        }
        Ok(())
    }

    /// Mean over trees of the laughter frequency in the leaf reached.
    pub fn predict_proba(&self, row: &[T]) -> Result<f64> {
        self.check_dim(row)?;
        let sum: f64 = self.trees.iter().map(|t| t.predict_proba(row)).sum();
        Ok(sum / self.trees.len() as f64)
    }

    /// Label and laughter probability; ties go to [`Class::Other`].
    pub fn predict(&self, row: &[T]) -> Result<(Class, f64)> {
        let p = self.predict_proba(row)?;
        let label = if p > 0.5 { Class::Laughter } else { Class::Other };
        Ok((label, p))
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Model(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let model: Self = serde_json::from_str(&text)
            .map_err(|e| Error::Model(format!("{}: {e}", path.display())))?;
        model.validate()?;
        Ok(model)
    }

    /// Structural checks on a deserialised model.
    pub fn validate(&self) -> Result<()> {
        if self.trees.is_empty() {
            return Err(Error::Model("model has no trees".into()));
        }
        let dim = self.feature_order.len();
        for (i, t) in self.trees.iter().enumerate() {
            if let Some(f) = t.split_features().find(|&f| f >= dim) {
                return Err(Error::Model(format!("tree {i} splits on feature {f} ≥ {dim}")));
            }
            if t.depth() > self.config.max_depth {
                return Err(Error::Model(format!("tree {i} exceeds max_depth")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::tree::Node;

    fn toy() -> (Vec<Vec<f64>>, Vec<Class>) {
        let x: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64, (i % 3) as f64]).collect();
        let y = (0..40).map(|i| if i >= 20 { Class::Laughter } else { Class::Other }).collect();
        (x, y)
    }

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("f{i}")).collect()
    }

    #[test]
    fn sqrt_rule() {
        assert_eq!(FeaturesPerSplit::Sqrt.resolve(70), 8);
        assert_eq!(FeaturesPerSplit::Sqrt.resolve(84), 9);
        assert_eq!(FeaturesPerSplit::Sqrt.resolve(2), 1);
        assert_eq!(FeaturesPerSplit::Fixed(100).resolve(5), 5);
    }

    #[test]
    fn single_class_rejected() {
        let x = vec![vec![1.0f64], vec![2.0]];
        let y = vec![Class::Other, Class::Other];
        assert!(ForestModel::train(&x, &y, names(1), &ForestConfig::default()).is_err());
    }

    #[test]
    fn config_bounds() {
        let bad = ForestConfig {
            min_samples_split: 1,
            ..ForestConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = ForestConfig {
            n_estimators: 0,
            ..ForestConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn same_seed_same_model() {
        let (x, y) = toy();
        let cfg = ForestConfig {
            seed: 42,
            ..ForestConfig::default()
        };
        let a = ForestModel::train(&x, &y, names(2), &cfg).unwrap();
        let b = ForestModel::train(&x, &y, names(2), &cfg).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        let c = ForestModel::train(&x, &y, names(2), &ForestConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a.to_json().unwrap(), c.to_json().unwrap());
    }

    #[test]
    fn dimension_mismatch() {
        let (x, y) = toy();
        let m = ForestModel::train(&x, &y, names(2), &ForestConfig::default()).unwrap();
        assert!(m.predict(&[1.0]).is_err());
        let (label, p) = m.predict(&[39.0, 0.0]).unwrap();
        assert_eq!(label, Class::Laughter);
        assert!(p > 0.9);
    }

    #[test]
    fn single_stump_forest_equals_stump() {
        let (x, y) = toy();
        let cfg = ForestConfig {
            n_estimators: 1,
            max_depth: 1,
            ..ForestConfig::default()
        };
        let m = ForestModel::train(&x, &y, names(2), &cfg).unwrap();
        assert!(m.trees[0].depth() <= 1);
        for row in &x {
            assert_eq!(m.predict_proba(row).unwrap(), m.trees[0].predict_proba(row));
        }
    }

    #[test]
    fn tie_goes_to_other() {
        let model = ForestModel::<f64> {
            feature_order: names(1),
            config: ForestConfig::default(),
            trees: vec![crate::forest::Tree {
                nodes: vec![Node::Leaf { counts: [3, 3] }],
            }],
        };
        assert_eq!(model.predict(&[0.0]).unwrap(), (Class::Other, 0.5));
    }

    #[test]
    fn save_load_round_trip() {
        let (x, y) = toy();
        let m = ForestModel::train(&x, &y, names(2), &ForestConfig::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.json");
        m.save(&p).unwrap();
        assert_eq!(ForestModel::<f64>::load(&p).unwrap(), m);
    }

    #[test]
    fn load_rejects_out_of_range_feature() {
        let model = ForestModel::<f64> {
            feature_order: names(1),
            config: ForestConfig::default(),
            trees: vec![crate::forest::Tree {
                nodes: vec![
                    Node::Split { feature: 3, threshold: 0.0, left: 1, right: 2 },
                    Node::Leaf { counts: [1, 0] },
                    Node::Leaf { counts: [0, 1] },
                ],
            }],
        };
        assert!(model.validate().is_err());
    }
}
