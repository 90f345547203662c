use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;

use crate::command::ActionCommand;
use crate::graph::{FeatureVector, Vocabulary};

/// Maps a command to its action-feature indices: a one-hot verb block
/// followed by an entity-presence block over the vocabulary.
#[derive(Debug, Clone)]
pub struct ActionFeaturizer {
    verbs: HashMap<String, usize>,
    verb_count: usize,
    vocab: Vocabulary,
}

impl ActionFeaturizer {
    /// Verb indices follow the sorted verb names.
    pub fn new(verbs: impl IntoIterator<Item = String>, vocab: &Vocabulary) -> Self {
        let mut names: Vec<String> = verbs.into_iter().collect();
        names.sort();
        names.dedup();
        let verb_count = names.len();
        let verbs = names.into_iter().enumerate().map(|(i, v)| (v, i)).collect();
        ActionFeaturizer {
            verbs,
            verb_count,
            vocab: vocab.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.verb_count + self.vocab.len()
    }

    /// Indices of the nonzero (unit) entries of `phi(c)`. Unknown verbs and
    /// entities contribute nothing.
    pub fn features(&self, c: &ActionCommand) -> Vec<usize> {
        let mut out = Vec::with_capacity(1 + c.args.len());
        if let Some(&i) = self.verbs.get(&c.verb) {
            out.push(i);
        }
        for a in &c.args {
            if let Some(i) = self.vocab.index(a) {
                out.push(self.verb_count + i);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ParamsError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

const DUMP_MAGIC: &str = "slicelife-policy 1";

/// Linear actor-critic weights.
///
/// The actor is an `action_dim x feature_dim` matrix stored row-major; the
/// critic is a `feature_dim` vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyParameters {
    action_dim: usize,
    feature_dim: usize,
    pub(crate) actor: Vec<f64>,
    pub(crate) critic: Vec<f64>,
}

impl PolicyParameters {
    pub fn zeros(action_dim: usize, feature_dim: usize) -> Self {
        PolicyParameters {
            action_dim,
            feature_dim,
            actor: vec![0.0; action_dim * feature_dim],
            critic: vec![0.0; feature_dim],
        }
    }

    /// Actor entries uniform in `[-scale, scale]`, critic zero.
    pub fn random<R: Rng>(action_dim: usize, feature_dim: usize, scale: f64, rng: &mut R) -> Self {
        let mut p = Self::zeros(action_dim, feature_dim);
        if scale > 0.0 {
            for w in &mut p.actor {
                *w = rng.gen_range(-scale..=scale);
            }
        }
        p
    }

    pub fn action_dim(&self) -> usize {
        self.action_dim
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn actor(&self, action: usize, feature: usize) -> f64 {
        self.actor[action * self.feature_dim + feature]
    }

    pub fn actor_mut(&mut self, action: usize, feature: usize) -> &mut f64 {
        &mut self.actor[action * self.feature_dim + feature]
    }

    pub fn critic(&self) -> &[f64] {
        &self.critic
    }

    pub fn critic_mut(&mut self) -> &mut [f64] {
        &mut self.critic
    }

    /// Number of scalar parameters, actor first.
    pub fn len(&self) -> usize {
        self.actor.len() + self.critic.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat view used by finite-difference checks: actor entries then critic.
    pub fn get(&self, i: usize) -> f64 {
        if i < self.actor.len() {
            self.actor[i]
        } else {
            self.critic[i - self.actor.len()]
        }
    }

    pub fn set(&mut self, i: usize, v: f64) {
        if i < self.actor.len() {
            self.actor[i] = v;
        } else {
            let n = self.actor.len();
            self.critic[i - n] = v;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.actor.iter().chain(&self.critic).all(|w| w.is_finite())
    }

    /// Critic estimate `w . s`.
    pub fn value(&self, s: &FeatureVector) -> f64 {
        debug_assert_eq!(s.len(), self.feature_dim);
        s.values()
            .iter()
            .zip(&self.critic)
            .filter(|(x, _)| **x != 0.0)
            .map(|(x, w)| x * w)
            .sum()
    }

    /// `A s`, one entry per action feature.
    pub fn project(&self, s: &FeatureVector) -> Vec<f64> {
        debug_assert_eq!(s.len(), self.feature_dim);
        let nz = s.nonzero();
        (0..self.action_dim)
            .map(|a| {
                let row = &self.actor[a * self.feature_dim..(a + 1) * self.feature_dim];
                nz.iter().map(|&(j, x)| row[j] * x).sum()
            })
            .collect()
    }

    /// `phi(c)^T A s` for each candidate, given its feature indices.
    pub fn logits(&self, s: &FeatureVector, candidate_features: &[Vec<usize>]) -> Vec<f64> {
        let projected = self.project(s);
        candidate_features
            .iter()
            .map(|phi| phi.iter().map(|&i| projected[i]).sum())
            .collect()
    }

    /// Text dump: a magic line, a dimension header, then one actor row per
    /// line and the critic on the last line. Floats use Rust's shortest
    /// round-trip formatting, so [`PolicyParameters::parse`] restores the
    /// exact bits.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{DUMP_MAGIC}").unwrap();
        writeln!(out, "dims {} {}", self.action_dim, self.feature_dim).unwrap();
        let row = |out: &mut String, tag: &str, ws: &[f64]| {
            out.push_str(tag);
            for w in ws {
                write!(out, " {w:?}").unwrap();
            }
            out.push('\n');
        };
        for a in 0..self.action_dim {
            row(&mut out, "actor", &self.actor[a * self.feature_dim..(a + 1) * self.feature_dim]);
        }
        row(&mut out, "critic", &self.critic);
        out
    }

    pub fn parse(text: &str) -> Result<Self, ParamsError> {
        let err = |line: usize, message: &str| ParamsError::Format {
            line,
            message: message.to_string(),
        };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, l)) if l == DUMP_MAGIC => {}
            _ => return Err(err(1, "missing header")),
        }
        let (n, dims) = lines.next().ok_or_else(|| err(2, "missing dims line"))?;
        let dims: Vec<usize> = dims
            .strip_prefix("dims ")
            .ok_or_else(|| err(n, "expected dims"))?
            .split_whitespace()
            .map(|d| d.parse().map_err(|_| err(n, "bad dimension")))
            .collect::<Result<_, _>>()?;
        let [action_dim, feature_dim] = dims[..] else {
            return Err(err(n, "expected two dimensions"));
        };
        let mut p = Self::zeros(action_dim, feature_dim);
        let mut parse_row = |tag: &str, dest: &mut [f64]| -> Result<(), ParamsError> {
            let (n, l) = lines.next().ok_or_else(|| err(0, "truncated dump"))?;
            let mut fields = l.split_whitespace();
            if fields.next() != Some(tag) {
                return Err(err(n, &format!("expected {tag} row")));
            }
            let values: Vec<f64> = fields
                .map(|f| f.parse().map_err(|_| err(n, "bad number")))
                .collect::<Result<_, _>>()?;
            if values.len() != dest.len() {
                return Err(err(n, "row length does not match dims"));
            }
            dest.copy_from_slice(&values);
            Ok(())
        };
        for a in 0..action_dim {
            parse_row("actor", &mut p.actor[a * feature_dim..(a + 1) * feature_dim])?;
        }
        parse_row("critic", &mut p.critic)?;
        if !p.is_finite() {
            return Err(err(0, "non-finite weight"));
        }
        Ok(p)
    }

    pub fn save(&self, path: &Path) -> Result<(), ParamsError> {
        Ok(std::fs::write(path, self.dump())?)
    }

    pub fn load(path: &Path) -> Result<Self, ParamsError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Softmax over `phi(c)^T A s` for every candidate, in candidate order.
pub fn policy_distribution(
    params: &PolicyParameters,
    state: &FeatureVector,
    candidates: &[ActionCommand],
    featurizer: &ActionFeaturizer,
) -> Vec<(ActionCommand, f64)> {
    let feats: Vec<Vec<usize>> = candidates.iter().map(|c| featurizer.features(c)).collect();
    let probs = softmax(&params.logits(state, &feats));
    candidates.iter().cloned().zip(probs).collect()
}
