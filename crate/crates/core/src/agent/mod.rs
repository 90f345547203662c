//! Candidate generation, the linear actor-critic, and the agent variants.
//!
//! Each step the agent extracts triples from what it sees, optionally adds
//! commonsense triples on first entering a room, encodes the graph, builds
//! candidate commands from templates over believed entities, and samples one.

mod a2c;
mod candidates;
mod episode;
mod policy;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use a2c::{
    a2c_update, advantages, discounted_returns, gradient, surrogate_loss, SamplingSupport, TrainError,
    TrainingConfig, Trajectory, TrajectoryStep,
};
pub use candidates::{generate_candidates, templates_from_spec, ActionTemplate};
pub use episode::{act, build_vocabulary, AgentContext, Choice, Episode, StepView};
pub use policy::{policy_distribution, softmax, ActionFeaturizer, ParamsError, PolicyParameters};

use crate::commonsense::{
    CommonsenseError, FactBase, HasAKnowledgeBase, QuestionSet, SequenceModel, ShapingConfig,
};
use crate::world::EngineError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AgentVariant {
    /// Extraction only.
    #[serde(rename = "baseline")]
    Baseline,
    /// Adds HasA triples for each newly entered room.
    #[serde(rename = "hasa")]
    HasA,
    /// Adds question-answering triples for each newly entered room.
    #[serde(rename = "qa")]
    QA,
    /// Re-ranks the policy's shortlist with the sequence model.
    #[serde(rename = "shaped")]
    Shaped,
}

impl AgentVariant {
    pub const ALL: [AgentVariant; 4] = [
        AgentVariant::Baseline,
        AgentVariant::HasA,
        AgentVariant::QA,
        AgentVariant::Shaped,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AgentVariant::Baseline => "baseline",
            AgentVariant::HasA => "hasa",
            AgentVariant::QA => "qa",
            AgentVariant::Shaped => "shaped",
        }
    }
}

impl fmt::Display for AgentVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AgentVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AgentVariant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| format!("unknown agent variant {s:?}"))
    }
}

/// The commonsense sources an experiment makes available. Which of them a
/// run consults depends on its [`AgentVariant`].
#[derive(Debug, Clone)]
pub struct Providers {
    pub hasa: HasAKnowledgeBase,
    pub facts: FactBase,
    pub questions: QuestionSet,
    pub sequence: SequenceModel,
    pub shaping: ShapingConfig,
}

impl Providers {
    pub fn load(
        hasa: &Path,
        facts: &Path,
        corpus: &Path,
        shaping: ShapingConfig,
    ) -> Result<Self, CommonsenseError> {
        shaping.validate()?;
        Ok(Providers {
            hasa: HasAKnowledgeBase::load(hasa)?,
            facts: FactBase::load(facts)?,
            questions: QuestionSet::default(),
            sequence: SequenceModel::load(corpus, shaping.order, shaping.alpha)?,
            shaping,
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AgentError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error("step {step}: {command:?} is not among the generated candidates")]
    NotACandidate { step: usize, command: String },
}
