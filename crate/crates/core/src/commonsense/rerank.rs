use serde::{Deserialize, Serialize};

use super::{CommonsenseError, SequenceModel};
use crate::command::ActionCommand;

/// Re-ranking parameters plus the sequence model's own knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShapingConfig {
    /// Size of the candidate shortlist taken from the policy.
    pub k: usize,
    /// Weight of the sequence score against the policy log-probability.
    pub lambda: f64,
    /// n-gram order of the sequence model.
    pub order: usize,
    /// Additive smoothing constant of the sequence model.
    pub alpha: f64,
}

impl Default for ShapingConfig {
    fn default() -> Self {
        ShapingConfig {
            k: 5,
            lambda: 0.5,
            order: 2,
            alpha: 0.1,
        }
    }
}

impl ShapingConfig {
    pub fn validate(&self) -> Result<(), CommonsenseError> {
        if self.k < 1 {
            return Err(CommonsenseError::BadShaping("k must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(CommonsenseError::BadShaping(format!("lambda {} outside [0,1]", self.lambda)));
        }
        if self.order < 1 {
            return Err(CommonsenseError::BadOrder);
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(CommonsenseError::BadAlpha(self.alpha));
        }
        Ok(())
    }
}

/// Indices of the `k` most probable entries, ties broken by command text.
pub(crate) fn top_k(dist: &[(ActionCommand, f64)], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..dist.len()).collect();
    idx.sort_by(|&a, &b| {
        dist[b]
            .1
            .total_cmp(&dist[a].1)
            .then_with(|| dist[a].0.surface.cmp(&dist[b].0.surface))
    });
    idx.truncate(k);
    idx
}

/// Restricts `dist` to its top `k` entries and reweights each survivor by
/// `exp((1 - lambda) * log p + lambda * score)`, then renormalizes.
///
/// The output keeps the input order; entries outside the shortlist get 0.
pub fn rerank(
    dist: &[(ActionCommand, f64)],
    model: &SequenceModel,
    history: &[ActionCommand],
    cfg: &ShapingConfig,
) -> Vec<(ActionCommand, f64)> {
    let keep = top_k(dist, cfg.k);
    let mut weights = vec![0.0; dist.len()];
    if cfg.lambda == 0.0 {
        for &i in &keep {
            weights[i] = dist[i].1;
        }
    } else {
        let logs: Vec<(usize, f64)> = keep
            .iter()
            .map(|&i| {
                let s = model.score_sequence(history, &dist[i].0);
                (i, (1.0 - cfg.lambda) * dist[i].1.ln() + cfg.lambda * s)
            })
            .collect();
        let max = logs.iter().map(|(_, l)| *l).fold(f64::NEG_INFINITY, f64::max);
        for (i, l) in logs {
            weights[i] = (l - max).exp();
        }
    }
    let total: f64 = keep.iter().map(|&i| weights[i]).sum();
    dist.iter()
        .zip(weights)
        .map(|((c, _), w)| (c.clone(), w / total))
        .collect()
}
