use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::agent::{AgentVariant, TrainingConfig};
use crate::commonsense::ShapingConfig;
use crate::world::GameMode;

/// Environment variable that replaces the configured output directory.
pub const OUT_DIR_ENV: &str = "SLICELIFE_OUT_DIR";

/// How much of the game's distractor surface to keep. Absent fields keep
/// every declared distractor.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DistractorLimit {
    pub objects: Option<usize>,
    pub verbs: Option<usize>,
}

/// One experiment: a game, a mode, the agent variants and seeds to train.
///
/// Relative paths are resolved against the directory of the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub spec: PathBuf,
    pub rules: PathBuf,
    pub hasa: PathBuf,
    pub facts: PathBuf,
    pub corpus: PathBuf,
    pub mode: GameMode,
    pub variants: Vec<AgentVariant>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub distractors: DistractorLimit,
    #[serde(default)]
    pub training: TrainingConfig,
    #[serde(default)]
    pub shaping: ShapingConfig,
}

fn default_seeds() -> Vec<u64> {
    vec![1, 2, 3, 4]
}

impl ExperimentConfig {
    /// Reads a TOML config, resolves its paths and applies the output
    /// directory override from [`OUT_DIR_ENV`].
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::parse(&text).map_err(|e| match e {
            HarnessError::Config(m) => HarnessError::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve(base);
        if let Some(dir) = std::env::var_os(OUT_DIR_ENV) {
            cfg.output_dir = PathBuf::from(dir);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses TOML without touching the filesystem.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// Makes relative paths relative to `base`.
    pub fn resolve(&mut self, base: &Path) {
        for p in [
            &mut self.spec,
            &mut self.rules,
            &mut self.hasa,
            &mut self.facts,
            &mut self.corpus,
            &mut self.output_dir,
        ] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.seeds.is_empty() {
            return bad("seeds must not be empty".into());
        }
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        seeds.dedup();
        if seeds.len() != self.seeds.len() {
            return bad("seeds must be distinct".into());
        }
        if self.variants.is_empty() {
            return bad("variants must not be empty".into());
        }
        let mut vs = self.variants.clone();
        vs.sort();
        vs.dedup();
        if vs.len() != self.variants.len() {
            return bad("variants must be distinct".into());
        }
        self.training.validate().map_err(HarnessError::Config)?;
        self.shaping
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        for (what, p) in [
            ("spec", &self.spec),
            ("rules", &self.rules),
            ("hasa", &self.hasa),
            ("facts", &self.facts),
            ("corpus", &self.corpus),
        ] {
            if !p.is_file() {
                return bad(format!("{what} file {} does not exist", p.display()));
            }
        }
        Ok(())
    }

    pub fn metrics_path(&self) -> PathBuf {
        self.output_dir.join("metrics.csv")
    }
}
