//! The game engine: a deterministic slice-of-life text adventure with six
//! strictly ordered reward checkpoints, a terminal goal, and an ablated mode
//! that hides the bathroom fixtures from rendered text without removing them.
//!
//! Games are described by a plain-text spec file (see `data/nine05.schema.md`).
//! The engine itself is a set of pure functions over [`WorldState`];
//! [`Game`] bundles them for callers that want a mutable handle.

mod engine;
mod spec;
mod state;

pub use engine::{render, reset, run_walkthrough, step, step_text, EngineError, Game, WalkthroughError};
pub use spec::{
    Condition, Distractors, Effect, GameSpec, ObjectSpec, Placement, RewardCheckpoint, Room, RuleSpec,
    SlotRule, SpecError, Trigger, VerbSpec, CHECKPOINT_COUNT, CHECKPOINT_NAMES, WALKTHROUGH_MAX,
    WALKTHROUGH_MIN,
};
pub use state::{CheckpointMask, GameMode, ObjectLocation, ObjectState, Observation, WorldState};

/// Maximum cumulative reward in one episode: six checkpoints plus the goal.
pub const MAX_EPISODE_REWARD: u32 = CHECKPOINT_COUNT as u32 + 1;

#[cfg(test)]
mod tests;
