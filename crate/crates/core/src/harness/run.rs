use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::metrics::{write_metrics, MetricsRow};
use super::{ExperimentConfig, HarnessError};
use crate::agent::{a2c_update, AgentContext, AgentError, AgentVariant, PolicyParameters, Providers};
use crate::extract::ExtractionRules;
use crate::world::GameSpec;

/// A loaded experiment: config plus the game and provider data it names.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub spec: GameSpec,
    pub rules: ExtractionRules,
    pub providers: Providers,
}

/// Training output for one (variant, seed) pair.
#[derive(Debug, Clone)]
pub struct CellResult {
    pub variant: AgentVariant,
    pub seed: u64,
    pub rows: Vec<MetricsRow>,
    pub params: PolicyParameters,
}

impl Experiment {
    pub fn load(config: ExperimentConfig) -> Result<Self, HarnessError> {
        config.validate()?;
        let mut spec = GameSpec::load(&config.spec)?;
        let limit = &config.distractors;
        if limit.objects.is_some() || limit.verbs.is_some() {
            let d = spec.distractors();
            let objects = limit.objects.unwrap_or(d.objects.len());
            let verbs = limit.verbs.unwrap_or(d.verbs.len());
            spec = spec.with_distractor_limit(objects, verbs)?;
        }
        let rules = ExtractionRules::load(&config.rules)?;
        let providers = Providers::load(&config.hasa, &config.facts, &config.corpus, config.shaping.clone())?;
        Ok(Experiment {
            config,
            spec,
            rules,
            providers,
        })
    }

    /// Trains one cell from scratch. The seed alone fixes the initial
    /// parameters and every sampled action.
    pub fn train_cell(&self, variant: AgentVariant, seed: u64) -> Result<CellResult, HarnessError> {
        let training = &self.config.training;
        let mut ctx = AgentContext::new(&self.spec, self.config.mode, &self.rules, &self.providers);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = ctx.init_params(training, &mut rng);
        let mut rows = Vec::with_capacity(training.episodes as usize);
        for episode in 0..training.episodes {
            let cell_err = |source: AgentError| HarnessError::Cell {
                variant,
                seed,
                episode,
                source,
            };
            let ep = ctx
                .run_episode(variant, &params, training, &mut rng)
                .map_err(cell_err)?;
            params = a2c_update(&params, &ep.trajectory, training).map_err(|e| cell_err(e.into()))?;
            rows.push(MetricsRow {
                variant,
                seed,
                episode,
                reward: ep.reward,
                steps: ep.steps,
                checkpoints: ep.checkpoints,
            });
        }
        Ok(CellResult {
            variant,
            seed,
            rows,
            params,
        })
    }

    /// Trains every (variant, seed) cell, in parallel, returning results in
    /// config order.
    pub fn train_all(&self) -> Result<Vec<CellResult>, HarnessError> {
        let cells: Vec<(AgentVariant, u64)> = self
            .config
            .variants
            .iter()
            .flat_map(|&v| self.config.seeds.iter().map(move |&s| (v, s)))
            .collect();
        cells
            .par_iter()
            .map(|&(v, s)| self.train_cell(v, s))
            .collect()
    }
}

/// Runs the experiment and writes `metrics.csv` (and one parameter dump per
/// cell) into the output directory. Returns the metrics path.
pub fn run_experiment(config: &ExperimentConfig) -> Result<PathBuf, HarnessError> {
    let exp = Experiment::load(config.clone())?;
    let results = exp.train_all()?;
    let dir = &config.output_dir;
    let io = |path: PathBuf| move |source| HarnessError::Io { path, source };
    std::fs::create_dir_all(dir).map_err(io(dir.clone()))?;
    let rows: Vec<MetricsRow> = results.iter().flat_map(|r| r.rows.iter().cloned()).collect();
    let metrics = config.metrics_path();
    std::fs::write(&metrics, write_metrics(&rows)).map_err(io(metrics.clone()))?;
    for r in &results {
        let path = dir.join(format!("params-{}-{}.txt", r.variant, r.seed));
        std::fs::write(&path, r.params.dump()).map_err(io(path.clone()))?;
    }
    Ok(metrics)
}
