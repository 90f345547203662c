use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::policy::{softmax, PolicyParameters};
use crate::command::ActionCommand;
use crate::graph::FeatureVector;

/// Optimisation and episode settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingConfig {
    pub gamma: f64,
    pub learning_rate: f64,
    pub entropy_coef: f64,
    pub value_coef: f64,
    pub step_cap: u32,
    pub episodes: u32,
    /// Half-width of the uniform actor initialisation.
    pub init_scale: f64,
    /// Global gradient-norm clip applied before the step; 0 disables it.
    pub max_grad_norm: f64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            gamma: 0.95,
            learning_rate: 0.01,
            entropy_coef: 0.01,
            value_coef: 0.01,
            step_cap: 60,
            episodes: 5000,
            init_scale: 0.1,
            max_grad_norm: 20.0,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(format!("gamma {} outside (0,1]", self.gamma));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(format!("learning_rate {} must be positive", self.learning_rate));
        }
        if !(self.entropy_coef >= 0.0 && self.entropy_coef.is_finite()) {
            return Err(format!("entropy_coef {} must be non-negative", self.entropy_coef));
        }
        if !(self.value_coef >= 0.0 && self.value_coef.is_finite()) {
            return Err(format!("value_coef {} must be non-negative", self.value_coef));
        }
        if self.step_cap == 0 {
            return Err("step_cap must be at least 1".into());
        }
        if !(self.max_grad_norm >= 0.0 && self.max_grad_norm.is_finite()) {
            return Err(format!("max_grad_norm {} must be non-negative", self.max_grad_norm));
        }
        if !(self.init_scale >= 0.0 && self.init_scale.is_finite()) {
            return Err(format!("init_scale {} must be non-negative", self.init_scale));
        }
        Ok(())
    }
}

/// The distribution an action was sampled from, expressed over the
/// candidate list: `q(j) = softmax_j(scale * logit_j + offset_j)` for `j` in
/// `indices`, zero elsewhere.
///
/// The plain policy is `scale = 1` with zero offsets over every candidate. A
/// re-ranked policy keeps its shortlist, scales logits by `1 - lambda` and
/// adds `lambda * score` as the offset.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingSupport {
    pub indices: Vec<usize>,
    pub offsets: Vec<f64>,
    pub scale: f64,
}

impl SamplingSupport {
    pub fn full(n: usize) -> Self {
        SamplingSupport {
            indices: (0..n).collect(),
            offsets: vec![0.0; n],
            scale: 1.0,
        }
    }

    /// Probabilities over `indices`, given logits for every candidate.
    pub fn distribution(&self, logits: &[f64]) -> Vec<f64> {
        let z: Vec<f64> = self
            .indices
            .iter()
            .zip(&self.offsets)
            .map(|(&i, o)| self.scale * logits[i] + o)
            .collect();
        softmax(&z)
    }
}

#[derive(Debug, Clone)]
pub struct TrajectoryStep {
    pub features: FeatureVector,
    pub command: ActionCommand,
    /// Shared between consecutive steps while the candidate set is unchanged.
    pub candidates: Arc<[ActionCommand]>,
    /// Action-feature indices of each candidate.
    pub candidate_features: Arc<[Vec<usize>]>,
    /// Index of `command` in `candidates`.
    pub chosen: usize,
    pub support: SamplingSupport,
    pub probability: f64,
    pub reward: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub steps: Vec<TrajectoryStep>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn total_reward(&self) -> f64 {
        self.steps.iter().map(|s| s.reward).sum()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TrainError {
    #[error("empty trajectory")]
    Empty,
    #[error("non-finite gradient at step {step}")]
    NonFinite { step: usize },
}

fn entropy(p: &[f64]) -> f64 {
    p.iter().filter(|x| **x > 0.0).map(|x| -x * x.ln()).sum()
}

/// Discounted returns, bootstrapping with 0 after the last step.
pub fn discounted_returns(rewards: &[f64], gamma: f64) -> Vec<f64> {
    let mut out = vec![0.0; rewards.len()];
    let mut g = 0.0;
    for (t, r) in rewards.iter().enumerate().rev() {
        g = r + gamma * g;
        out[t] = g;
    }
    out
}

/// Returns and advantages under the given critic.
pub fn advantages(params: &PolicyParameters, traj: &Trajectory, gamma: f64) -> (Vec<f64>, Vec<f64>) {
    let rewards: Vec<f64> = traj.steps.iter().map(|s| s.reward).collect();
    let returns = discounted_returns(&rewards, gamma);
    let adv = traj
        .steps
        .iter()
        .zip(&returns)
        .map(|(s, g)| g - params.value(&s.features))
        .collect();
    (returns, adv)
}

/// The loss whose gradient [`a2c_update`] descends, with returns and
/// advantages held fixed:
///
/// `-sum_t (A_t log q_t(c_t) + beta H(pi_t)) + c_v sum_t (G_t - V(s_t))^2`
///
/// where `q_t` is the distribution the action was sampled from and `pi_t`
/// the policy softmax over every candidate. The two coincide except for
/// re-ranked sampling.
pub fn surrogate_loss(
    params: &PolicyParameters,
    traj: &Trajectory,
    cfg: &TrainingConfig,
    returns: &[f64],
    advantages: &[f64],
) -> f64 {
    let mut loss = 0.0;
    for (t, step) in traj.steps.iter().enumerate() {
        let logits = params.logits(&step.features, &step.candidate_features);
        let q = step.support.distribution(&logits);
        let pos = step
            .support
            .indices
            .iter()
            .position(|&i| i == step.chosen)
            .expect("chosen action lies in its sampling support");
        let entropy = entropy(&softmax(&logits));
        let v = params.value(&step.features);
        loss -= advantages[t] * q[pos].ln() + cfg.entropy_coef * entropy;
        loss += cfg.value_coef * (returns[t] - v).powi(2);
    }
    loss
}

/// Gradient of [`surrogate_loss`] with respect to every parameter, in the
/// flat actor-then-critic order of [`PolicyParameters::get`].
pub fn gradient(
    params: &PolicyParameters,
    traj: &Trajectory,
    cfg: &TrainingConfig,
) -> Result<PolicyParameters, TrainError> {
    if traj.is_empty() {
        return Err(TrainError::Empty);
    }
    let (returns, adv) = advantages(params, traj, cfg.gamma);
    let mut grad = PolicyParameters::zeros(params.action_dim(), params.feature_dim());
    let mut row_coef = vec![0.0; params.action_dim()];
    let mut touched: Vec<usize> = Vec::new();
    let mut d_logit: Vec<f64> = Vec::new();

    for (t, step) in traj.steps.iter().enumerate() {
        let logits = params.logits(&step.features, &step.candidate_features);
        let sup = &step.support;
        let q = sup.distribution(&logits);
        let pi = softmax(&logits);
        let entropy = entropy(&pi);

        // dLoss/dlogit for each candidate, then pushed onto the action
        // feature rows it touches.
        d_logit.clear();
        d_logit.extend(pi.iter().map(|&p| {
            let log_p = if p > 0.0 { p.ln() } else { 0.0 };
            cfg.entropy_coef * p * (log_p + entropy)
        }));
        for (k, &j) in sup.indices.iter().enumerate() {
            let chosen = if j == step.chosen { 1.0 } else { 0.0 };
            d_logit[j] -= sup.scale * adv[t] * (chosen - q[k]);
        }
        for (j, &d) in d_logit.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            for &i in &step.candidate_features[j] {
                if row_coef[i] == 0.0 {
                    touched.push(i);
                }
                row_coef[i] += d;
            }
        }
        let nz = step.features.nonzero();
        for &i in &touched {
            let c = row_coef[i];
            for &(m, x) in &nz {
                *grad.actor_mut(i, m) += c * x;
            }
            row_coef[i] = 0.0;
        }
        touched.clear();

        let v = params.value(&step.features);
        let dv = -2.0 * cfg.value_coef * (returns[t] - v);
        for &(m, x) in &nz {
            grad.critic_mut()[m] += dv * x;
        }
        if !(adv[t].is_finite() && entropy.is_finite() && dv.is_finite()) {
            return Err(TrainError::NonFinite { step: t });
        }
    }
    if !grad.is_finite() {
        return Err(TrainError::NonFinite { step: traj.len() - 1 });
    }
    Ok(grad)
}

/// One gradient step of size `learning_rate` on [`surrogate_loss`], with
/// the gradient rescaled to norm `max_grad_norm` when it is longer.
pub fn a2c_update(
    params: &PolicyParameters,
    traj: &Trajectory,
    cfg: &TrainingConfig,
) -> Result<PolicyParameters, TrainError> {
    let grad = gradient(params, traj, cfg)?;
    let norm = grad.actor.iter().chain(&grad.critic).map(|g| g * g).sum::<f64>().sqrt();
    let step = if cfg.max_grad_norm > 0.0 && norm > cfg.max_grad_norm {
        cfg.learning_rate * cfg.max_grad_norm / norm
    } else {
        cfg.learning_rate
    };
    let mut next = params.clone();
    for (w, g) in next.actor.iter_mut().zip(&grad.actor) {
        *w -= step * g;
    }
    for (w, g) in next.critic.iter_mut().zip(&grad.critic) {
        *w -= step * g;
    }
    if !next.is_finite() {
        return Err(TrainError::NonFinite { step: traj.len() - 1 });
    }
    Ok(next)
}
