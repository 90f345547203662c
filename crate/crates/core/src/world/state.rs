use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::extract::EntityId;

/// Whether the bathroom's key fixtures are mentioned in rendered text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GameMode {
    Full,
    Ablated,
}

impl fmt::Display for GameMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GameMode::Full => "full",
            GameMode::Ablated => "ablated",
        })
    }
}

/// Bitmask over checkpoint ordinals 1..=6. Only prefix masks are reachable.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct CheckpointMask(u8);

impl CheckpointMask {
    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn from_bits(bits: u8) -> Self {
        CheckpointMask(bits)
    }

    pub fn contains(self, ordinal: u8) -> bool {
        (1..=8).contains(&ordinal) && self.0 & (1 << (ordinal - 1)) != 0
    }

    pub fn set(&mut self, ordinal: u8) {
        self.0 |= 1 << (ordinal - 1);
    }

    pub fn count(self) -> u8 {
        self.0.count_ones() as u8
    }

    /// True when the set ordinals are exactly `1..=count()`.
    pub fn is_prefix(self) -> bool {
        self.0 & self.0.wrapping_add(1) == 0
    }

    /// The ordinal that may fire next.
    pub fn next_ordinal(self) -> u8 {
        self.count() + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ObjectLocation {
    Room(EntityId),
    On(EntityId),
    In(EntityId),
    Player,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ObjectState {
    pub location: ObjectLocation,
    pub worn: bool,
    pub tags: BTreeSet<String>,
}

/// Engine-internal ground truth.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WorldState {
    pub player_location: EntityId,
    pub objects: BTreeMap<EntityId, ObjectState>,
    pub flags: BTreeSet<String>,
    pub checkpoint_mask: CheckpointMask,
    pub step_count: u32,
    pub terminal: bool,
}

impl WorldState {
    pub fn object(&self, id: &EntityId) -> Option<&ObjectState> {
        self.objects.get(id)
    }

    pub fn is_worn(&self, id: &EntityId) -> bool {
        self.objects.get(id).is_some_and(|o| o.worn)
    }

    pub fn is_carried(&self, id: &EntityId) -> bool {
        self.objects
            .get(id)
            .is_some_and(|o| o.location == ObjectLocation::Player)
    }

    /// Whether the player can currently reach the object.
    pub fn in_scope(&self, id: &EntityId) -> bool {
        // Nesting depth is bounded by the object count; guard against cycles.
        let mut current = id;
        for _ in 0..=self.objects.len() {
            let Some(obj) = self.objects.get(current) else {
                return false;
            };
            match &obj.location {
                ObjectLocation::Player => return true,
                ObjectLocation::Room(r) => return r == &self.player_location,
                ObjectLocation::On(holder) => current = holder,
                ObjectLocation::In(holder) => {
                    if !self.objects.get(holder).is_some_and(|h| h.tags.contains("open")) {
                        return false;
                    }
                    current = holder;
                }
            }
        }
        false
    }
}

/// What the agent sees after a reset or step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    pub text: String,
    pub location_id: EntityId,
    pub reward: u32,
    pub done: bool,
    /// The command was refused, unparseable or referred to nothing in scope.
    pub failed: bool,
    /// Ordinal of the checkpoint fired by this step, if any.
    pub checkpoint: Option<u8>,
}
