//! Experiment configuration, read from a TOML file.
//!
//! ```toml
//! seed = 7
//! train_size = 500
//! test_size = 2000
//!
//! [group]
//! kind = "sign_flip"
//! params = { dim = 2 }
//!
//! [train]
//! arch = "lmf"
//! m = 16
//! n = 16
//! ```
//!
//! Unknown keys are rejected by name. The top-level `seed` is the single
//! source of randomness; it overrides `train.seed`.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use orbitmap::shapes::{InputFormat, ScaleMode};
use orbitmap::{EmbeddingModel, Group, TrainConfig};
use serde::{Deserialize, Serialize};

fn default_train_size() -> usize {
    500
}

fn default_test_size() -> usize {
    2000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    /// Output directory; `--out` wins.
    pub out: Option<PathBuf>,
    pub group: Option<Group>,
    pub train: Option<TrainConfig>,
    /// Standard Gaussian training points.
    #[serde(default = "default_train_size")]
    pub train_size: usize,
    /// Standard Gaussian test points, disjoint stream from training.
    #[serde(default = "default_test_size")]
    pub test_size: usize,
    /// Reference model evaluated by `distortion`.
    pub embedding: Option<EmbeddingModel<f64>>,
    /// Serialized model evaluated by `distortion` or applied by `shapes embed`.
    pub model_file: Option<PathBuf>,
    /// Random max filter search evaluated by `distortion`.
    pub rmf: Option<RmfConfig>,
    #[serde(default)]
    pub table: TableOverrides,
    #[serde(default)]
    pub shapes: ShapesConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            out: None,
            group: None,
            train: None,
            train_size: default_train_size(),
            test_size: default_test_size(),
            embedding: None,
            model_file: None,
            rmf: None,
            table: TableOverrides::default(),
            shapes: ShapesConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RmfConfig {
    pub m: usize,
    pub draws: usize,
}

/// Per-field overrides of a table scale preset.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableOverrides {
    pub train_size: Option<usize>,
    pub test_size: Option<usize>,
    pub steps: Option<usize>,
    pub restarts: Option<usize>,
    pub rmf_draws: Option<usize>,
    pub shape_count: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShapesConfig {
    /// Boundary samples per shape.
    pub k: usize,
    pub scale: ScaleMode,
    pub format: Option<InputFormat>,
    /// Fraction of shapes used for training when `shapes embed` trains.
    pub train_fraction: f64,
}

impl Default for ShapesConfig {
    fn default() -> Self {
        Self { k: 32, scale: ScaleMode::Raw, format: None, train_fraction: 0.75 }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        if let Some(t) = &cfg.train {
            t.validate()?;
        }
        if !(cfg.shapes.train_fraction > 0.0 && cfg.shapes.train_fraction < 1.0) {
            bail!("shapes.train_fraction must lie in (0, 1)");
        }
        Ok(cfg)
    }

    pub fn group(&self) -> anyhow::Result<&Group> {
        self.group.as_ref().context("config needs a [group] section")
    }

    /// `[train]` with the experiment seed.
    pub fn train_config(&self) -> anyhow::Result<TrainConfig> {
        let mut t = self.train.clone().context("config needs a [train] section")?;
        t.seed = self.seed;
        Ok(t)
    }
}
