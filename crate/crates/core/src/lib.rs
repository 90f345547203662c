//! A desk-scale workbench for text-adventure reinforcement learning with a
//! knowledge-graph belief state.
//!
//! The pieces, bottom-up:
//!
//! * [`world`]: a deterministic slice-of-life text adventure with ordered
//!   reward checkpoints and an ablated-observation mode.
//! * [`extract`]: rule-based extraction of belief triples from observation
//!   text.
//! * [`graph`]: the monotone knowledge graph, command filtering and feature
//!   encoding.
//! * [`commonsense`]: HasA inference, templated question answering and an
//!   n-gram command-sequence scorer used for policy shaping.
//! * [`agent`]: candidate generation, the linear actor-critic and the four
//!   agent variants.
//! * [`harness`]: experiment orchestration, metrics and the interactive REPL.

pub mod agent;
pub mod command;
pub mod commonsense;
pub mod extract;
pub mod graph;
pub mod harness;
pub mod world;

pub use agent::{AgentVariant, PolicyParameters, TrainingConfig, Trajectory};
pub use command::{ActionCommand, CommandTemplate};
pub use commonsense::{FactBase, HasAKnowledgeBase, QuestionSet, SequenceModel, ShapingConfig};
pub use extract::{canonicalize, EntityId, ExtractionRules, RelationLabel, Source, Triple};
pub use graph::{FeatureVector, KnowledgeGraph, Vocabulary};
pub use world::{GameMode, GameSpec, Observation, WorldState};

use std::path::PathBuf;

/// Directory holding the shipped data files (`nine05.spec`, `extract.rules`, ...).
///
/// Resolves to `data/` at the workspace root.
pub fn shipped_data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}
