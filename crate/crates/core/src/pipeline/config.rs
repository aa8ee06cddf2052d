use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::align::AlignConfig;
use crate::error::{Error, Result};
use crate::eval::EvalConfig;
use crate::features::FeatureConfig;
use crate::forest::ForestConfig;
use crate::labels::LabelingConfig;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelinePaths {
    pub manifest: Option<PathBuf>,
    pub words_a: Option<PathBuf>,
    pub words_b: Option<PathBuf>,
    pub laughter: Option<PathBuf>,
    /// Directory holding `{video_id}.wav`.
    pub audio_root: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

impl PipelinePaths {
    fn rebase(&mut self, dir: &Path) {
        for p in [
            &mut self.manifest,
            &mut self.words_a,
            &mut self.words_b,
            &mut self.laughter,
            &mut self.audio_root,
            &mut self.model,
            &mut self.out_dir,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
    }
}

/// Everything a run depends on. Loaded from JSON; command-line flags
/// override individual fields.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub paths: PipelinePaths,
    pub align: AlignConfig,
    pub features: FeatureConfig,
    pub forest: ForestConfig,
    pub labeling: LabelingConfig,
    pub eval: EvalConfig,
    /// Overrides `forest.seed`.
    pub seed: u64,
}

#[derive(Serialize)]
struct Settings<'a> {
    align: &'a AlignConfig,
    features: &'a FeatureConfig,
    forest: &'a ForestConfig,
    labeling: &'a LabelingConfig,
    eval: &'a EvalConfig,
}

impl PipelineConfig {
    /// Reads a JSON config. Relative paths in it are taken relative to the
    /// file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: Self = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })?;
        if let Some(dir) = path.parent() {
            cfg.paths.rebase(dir);
        }
        Ok(cfg)
    }

    pub fn forest_config(&self) -> ForestConfig {
        ForestConfig {
            seed: self.seed,
            ..self.forest.clone()
        }
    }

    /// SHA-256 of the settings that shape outputs. Paths are left out so the
    /// same run in another directory carries the same digest.
    pub fn digest(&self) -> String {
        let forest = self.forest_config();
        let s = Settings {
            align: &self.align,
            features: &self.features,
            forest: &forest,
            labeling: &self.labeling,
            eval: &self.eval,
        };
        let bytes = serde_json::to_vec(&s).expect("config serialises");
        hex::encode(Sha256::digest(bytes))
    }

    pub fn require<'a>(&self, field: &'a Option<PathBuf>, name: &str) -> Result<&'a Path> {
        field
            .as_deref()
            .ok_or_else(|| Error::Validation(format!("no path given for {name}")))
    }
}
