use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::spec::{Condition, Effect, GameSpec, ObjectSpec, Placement, Trigger};
use super::state::{CheckpointMask, GameMode, ObjectLocation, ObjectState, Observation, WorldState};
use crate::command::ActionCommand;
use crate::extract::EntityId;

const NOT_HERE: &str = "You can't see any such thing.";
const NOT_UNDERSTOOD: &str = "That's not a verb I recognise.";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("step called on a terminal state")]
    Terminal,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WalkthroughError {
    #[error("walkthrough command {index} {command:?} failed: {text}")]
    CommandFailed {
        index: usize,
        command: String,
        text: String,
    },
    #[error("walkthrough ended after {steps} steps without reaching the goal")]
    NotTerminal { steps: u32 },
}

/// Fresh state with the player in the start room and no checkpoints.
///
/// The engine has no stochastic elements, so `seed` does not influence the
/// result; it is accepted so every episode records where it came from.
pub fn reset(spec: &GameSpec, mode: GameMode, _seed: u64) -> (WorldState, Observation) {
    let objects = spec
        .objects()
        .iter()
        .map(|o| (o.id.clone(), initial_object_state(o)))
        .collect::<BTreeMap<_, _>>();
    let state = WorldState {
        player_location: spec.start_room().id.clone(),
        objects,
        flags: BTreeSet::new(),
        checkpoint_mask: CheckpointMask::default(),
        step_count: 0,
        terminal: false,
    };
    let obs = Observation {
        text: render(&state, spec, mode),
        location_id: state.player_location.clone(),
        reward: 0,
        done: false,
        failed: false,
        checkpoint: None,
    };
    (state, obs)
}

fn initial_location(o: &ObjectSpec) -> ObjectLocation {
    match (&o.on, &o.inside, &o.placement) {
        (Some(support), _, _) => ObjectLocation::On(support.clone()),
        (None, Some(container), _) => ObjectLocation::In(container.clone()),
        (None, None, Placement::Player) => ObjectLocation::Player,
        (None, None, Placement::Room(r)) => ObjectLocation::Room(r.clone()),
    }
}

fn initial_object_state(o: &ObjectSpec) -> ObjectState {
    ObjectState {
        location: initial_location(o),
        worn: o.worn,
        tags: BTreeSet::new(),
    }
}

struct Outcome {
    text: String,
    failed: bool,
}

impl Outcome {
    fn ok(text: impl Into<String>) -> Self {
        Outcome {
            text: text.into(),
            failed: false,
        }
    }

    fn refuse(text: impl Into<String>) -> Self {
        Outcome {
            text: text.into(),
            failed: true,
        }
    }
}

/// Applies one command. Ground truth drives applicability, so ablated
/// objects stay usable; `mode` only affects rendered text.
pub fn step(
    state: &WorldState,
    spec: &GameSpec,
    mode: GameMode,
    command: &ActionCommand,
) -> Result<(WorldState, Observation), EngineError> {
    if state.terminal {
        return Err(EngineError::Terminal);
    }
    let mut next = state.clone();
    next.step_count += 1;
    let outcome = apply(&mut next, spec, mode, command);
    Ok(finish(state, next, spec, outcome))
}

/// Parses and applies command text. Unparseable text is a failed no-op that
/// still counts as a step.
pub fn step_text(
    state: &WorldState,
    spec: &GameSpec,
    mode: GameMode,
    text: &str,
) -> Result<(WorldState, Observation), EngineError> {
    match spec.parse_command(text) {
        Some(cmd) => step(state, spec, mode, &cmd),
        None => {
            if state.terminal {
                return Err(EngineError::Terminal);
            }
            let mut next = state.clone();
            next.step_count += 1;
            let text = if spec.verbs().iter().any(|v| v.template.match_words(&crate::command::command_words(text)).is_some()) {
                NOT_HERE
            } else {
                NOT_UNDERSTOOD
            };
            Ok(finish(state, next, spec, Outcome::refuse(text)))
        }
    }
}

fn finish(prev: &WorldState, mut next: WorldState, spec: &GameSpec, outcome: Outcome) -> (WorldState, Observation) {
    let mut reward = 0;
    let mut checkpoint = None;
    let ordinal = prev.checkpoint_mask.next_ordinal();
    if let Some(cp) = spec.checkpoints().get(usize::from(ordinal) - 1) {
        if trigger_fired(&cp.trigger, prev, &next) {
            next.checkpoint_mask.set(ordinal);
            reward += 1;
            checkpoint = Some(ordinal);
        }
    }
    let all = usize::from(next.checkpoint_mask.count()) == spec.checkpoints().len();
    if all && trigger_fired(spec.goal(), prev, &next) {
        next.terminal = true;
        reward += 1;
    }
    let obs = Observation {
        text: outcome.text,
        location_id: next.player_location.clone(),
        reward,
        done: next.terminal,
        failed: outcome.failed,
        checkpoint,
    };
    (next, obs)
}

fn trigger_fired(trigger: &Trigger, prev: &WorldState, next: &WorldState) -> bool {
    match trigger {
        Trigger::EnterRoom(r) => &prev.player_location != r && &next.player_location == r,
        Trigger::Unworn(o) => prev.is_worn(o) && !next.is_worn(o),
        Trigger::Dropped(o) => prev.is_carried(o) && !next.is_carried(o),
        Trigger::Flag(f) => !prev.flags.contains(f) && next.flags.contains(f),
    }
}

fn condition_holds(c: &Condition, state: &WorldState) -> bool {
    match c {
        Condition::Flag(f, want) => state.flags.contains(f) == *want,
        Condition::Worn(o, want) => state.is_worn(o) == *want,
        Condition::Carried(o, want) => state.is_carried(o) == *want,
        Condition::At(r, want) => (&state.player_location == r) == *want,
    }
}

fn apply(state: &mut WorldState, spec: &GameSpec, mode: GameMode, cmd: &ActionCommand) -> Outcome {
    let Some(verb) = spec.verb(&cmd.verb) else {
        return Outcome::refuse(NOT_UNDERSTOOD);
    };
    if cmd.args.len() != verb.arity() {
        return Outcome::refuse(NOT_UNDERSTOOD);
    }
    let mut objects = Vec::with_capacity(cmd.args.len());
    for arg in &cmd.args {
        match spec.object(arg) {
            Some(o) if state.in_scope(arg) => objects.push(o),
            _ => return Outcome::refuse(NOT_HERE),
        }
    }

    let rule = spec.rule(&verb.name, objects.first().map(|o| &o.id));
    if let Some(rule) = rule {
        if !rule.requires.iter().all(|c| condition_holds(c, state)) {
            return Outcome::refuse(rule.refuse.clone().unwrap_or_else(|| "You can't do that yet.".into()));
        }
    }

    match &verb.effect {
        Effect::Move(dir) => {
            let room = spec.room(&state.player_location).expect("player is in a declared room");
            match room.exit(dir) {
                Some(dest) => {
                    state.player_location = dest.clone();
                    Outcome::ok(render(state, spec, mode))
                }
                None => Outcome::refuse("You can't go that way."),
            }
        }
        Effect::Look => Outcome::ok(render(state, spec, mode)),
        Effect::Wait => Outcome::ok("Time passes."),
        Effect::Inventory => {
            let carried = carried_list(state, spec, false);
            let mut text = if carried.is_empty() {
                "You are empty-handed.".to_string()
            } else {
                format!("You are carrying {}.", join_list(&carried))
            };
            text.push(' ');
            text.push_str(&wearing_sentence(state, spec));
            Outcome::ok(text)
        }
        Effect::SelfDescribe => {
            let mut text = verb.default_text.clone().unwrap_or_default();
            if !text.is_empty() {
                text.push(' ');
            }
            text.push_str(&wearing_sentence(state, spec));
            Outcome::ok(text)
        }
        Effect::Examine => {
            let o = objects[0];
            Outcome::ok(
                o.examine
                    .clone()
                    .unwrap_or_else(|| format!("You see nothing special about the {}.", o.name())),
            )
        }
        Effect::Take => {
            let o = objects[0];
            if state.is_carried(&o.id) {
                Outcome::refuse("You already have that.")
            } else if !o.portable {
                Outcome::refuse("That's fixed in place.")
            } else {
                let s = state.objects.get_mut(&o.id).expect("declared object");
                s.location = ObjectLocation::Player;
                Outcome::ok(format!("You pick up the {}.", o.name()))
            }
        }
        Effect::Drop => {
            let o = objects[0];
            if !state.is_carried(&o.id) {
                Outcome::refuse("You aren't carrying that.")
            } else if state.is_worn(&o.id) {
                Outcome::refuse("You'll have to take it off first.")
            } else {
                let here = state.player_location.clone();
                state.objects.get_mut(&o.id).expect("declared object").location = ObjectLocation::Room(here);
                Outcome::ok(format!("You drop the {}.", o.name()))
            }
        }
        Effect::Remove => {
            let o = objects[0];
            if !state.is_worn(&o.id) {
                Outcome::refuse("You aren't wearing that.")
            } else {
                state.objects.get_mut(&o.id).expect("declared object").worn = false;
                Outcome::ok(format!("You take off the {}.", o.name()))
            }
        }
        Effect::Wear => {
            let o = objects[0];
            if !o.wearable {
                Outcome::refuse("You can't wear that.")
            } else if state.is_worn(&o.id) {
                Outcome::refuse("You're already wearing that.")
            } else if !state.is_carried(&o.id) {
                Outcome::refuse("You aren't holding that.")
            } else {
                state.objects.get_mut(&o.id).expect("declared object").worn = true;
                Outcome::ok(format!("You put on the {}.", o.name()))
            }
        }
        Effect::Open => {
            let o = objects[0];
            if !o.container {
                return Outcome::refuse("That doesn't open.");
            }
            let s = state.objects.get_mut(&o.id).expect("declared object");
            if !s.tags.insert("open".to_string()) {
                return Outcome::refuse("It's already open.");
            }
            let inside: Vec<String> = spec
                .objects()
                .iter()
                .filter(|x| state.objects[&x.id].location == ObjectLocation::In(o.id.clone()))
                .map(ObjectSpec::with_article)
                .collect();
            if inside.is_empty() {
                Outcome::ok(format!("You open the {}. It is empty.", o.name()))
            } else {
                Outcome::ok(format!("You open the {}, revealing {}.", o.name(), join_list(&inside)))
            }
        }
        Effect::Put => {
            let (item, support) = (objects[0], objects[1]);
            if item.id == support.id {
                Outcome::refuse("You can't put something on itself.")
            } else if !state.is_carried(&item.id) {
                Outcome::refuse("You aren't carrying that.")
            } else if state.is_worn(&item.id) {
                Outcome::refuse("You'll have to take it off first.")
            } else if support.portable {
                Outcome::refuse("There's no good surface on that.")
            } else {
                state.objects.get_mut(&item.id).expect("declared object").location =
                    ObjectLocation::On(support.id.clone());
                Outcome::ok(format!("You put the {} on the {}.", item.name(), support.name()))
            }
        }
        Effect::Action => match rule {
            Some(rule) => {
                for flag in &rule.sets {
                    state.flags.insert(flag.clone());
                }
                match &rule.text {
                    Some(t) => Outcome::ok(t.clone()),
                    None => Outcome::ok("Done."),
                }
            }
            None => Outcome::refuse(verb.default_text.clone().unwrap_or_else(|| "Nothing happens.".into())),
        },
    }
}

fn carried_list(state: &WorldState, spec: &GameSpec, worn: bool) -> Vec<String> {
    spec.objects()
        .iter()
        .filter(|o| state.is_carried(&o.id) && state.is_worn(&o.id) == worn)
        .map(ObjectSpec::with_article)
        .collect()
}

fn wearing_sentence(state: &WorldState, spec: &GameSpec) -> String {
    let worn = carried_list(state, spec, true);
    if worn.is_empty() {
        "You aren't wearing anything.".to_string()
    } else {
        format!("You are wearing {}.", join_list(&worn))
    }
}

/// The room an object is ultimately in, following supports and containers.
fn room_of<'s>(state: &'s WorldState, id: &EntityId) -> Option<&'s EntityId> {
    let mut current = id;
    for _ in 0..=state.objects.len() {
        match &state.objects.get(current)?.location {
            ObjectLocation::Room(r) => return Some(r),
            ObjectLocation::Player => return Some(&state.player_location),
            ObjectLocation::On(h) | ObjectLocation::In(h) => current = h,
        }
    }
    None
}

/// `a`, `a and b`, `a, b and c`.
fn join_list(items: &[String]) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}

/// Describes the player's current room.
///
/// In ablated mode the mention lines of the room's ablated objects are
/// omitted, and anything resting on an ablated object is listed as loose
/// instead, so the ablated nouns never appear. All other text is identical
/// to full mode.
pub fn render(state: &WorldState, spec: &GameSpec, mode: GameMode) -> String {
    let room = spec
        .room(&state.player_location)
        .expect("player is in a declared room");
    let hidden = |id: &EntityId| mode == GameMode::Ablated && room.ablate.contains(id);

    let on_support = |support: &EntityId| -> Vec<String> {
        spec.objects()
            .iter()
            .filter(|o| state.objects[&o.id].location == ObjectLocation::On(support.clone()))
            .map(ObjectSpec::with_article)
            .collect()
    };
    let listing = |support: &ObjectSpec| -> Option<String> {
        let items = on_support(&support.id);
        match items.len() {
            0 => None,
            1 => Some(format!("On the {} is {}.", support.name(), items[0])),
            _ => Some(format!("On the {} are {}.", support.name(), join_list(&items))),
        }
    };

    let mut description = room.description.clone();
    let mut placeheld: BTreeSet<EntityId> = BTreeSet::new();
    while let Some(start) = description.find("{on:") {
        let Some(len) = description[start..].find('}') else {
            break;
        };
        let id = EntityId::new(&description[start + 4..start + len]);
        let line = spec.object(&id).and_then(listing).unwrap_or_default();
        description.replace_range(start..=start + len, &line);
        placeheld.insert(id);
    }
    let mut lines = vec![description.trim().to_string()];

    let here = ObjectLocation::Room(room.id.clone());
    let mut loose: Vec<String> = Vec::new();
    for o in spec.objects() {
        let s = &state.objects[&o.id];
        let at_home = s.location == initial_location(o);
        match (&o.mention, at_home) {
            (Some(mention), true) if room_of(state, &o.id) == Some(&room.id) => {
                let silenced = o
                    .mention_unless
                    .as_ref()
                    .is_some_and(|f| state.flags.contains(f));
                if !silenced && !hidden(&o.id) {
                    lines.push(mention.clone());
                }
            }
            _ if s.location == here && o.portable => loose.push(o.with_article()),
            _ => {}
        }
    }
    // Supports in this room without a placeholder get their own listing line.
    for support in spec.objects() {
        if placeheld.contains(&support.id) || state.objects[&support.id].location != here {
            continue;
        }
        if hidden(&support.id) {
            loose.extend(on_support(&support.id));
        } else if let Some(line) = listing(support) {
            lines.push(line);
        }
    }
    if !loose.is_empty() {
        lines.push(format!("You can also see {} here.", join_list(&loose)));
    }
    lines.join("\n")
}

/// Plays the golden walkthrough from a fresh reset.
///
/// Returns `(total_reward, steps)`. Fails at the first refused command, or
/// if the walkthrough ends before the goal.
pub fn run_walkthrough(spec: &GameSpec, mode: GameMode) -> Result<(u32, u32), WalkthroughError> {
    let (mut state, _) = reset(spec, mode, 0);
    let mut total = 0;
    for (index, command) in spec.walkthrough().iter().enumerate() {
        let (next, obs) = step_text(&state, spec, mode, command).map_err(|_| WalkthroughError::CommandFailed {
            index,
            command: command.clone(),
            text: "game already over".into(),
        })?;
        if obs.failed {
            return Err(WalkthroughError::CommandFailed {
                index,
                command: command.clone(),
                text: obs.text,
            });
        }
        total += obs.reward;
        state = next;
    }
    if !state.terminal {
        return Err(WalkthroughError::NotTerminal {
            steps: state.step_count,
        });
    }
    Ok((total, state.step_count))
}

/// A spec, a mode and the current state bundled together.
#[derive(Debug, Clone)]
pub struct Game<'a> {
    spec: &'a GameSpec,
    mode: GameMode,
    state: WorldState,
}

impl<'a> Game<'a> {
    pub fn new(spec: &'a GameSpec, mode: GameMode, seed: u64) -> (Self, Observation) {
        let (state, obs) = reset(spec, mode, seed);
        (Game { spec, mode, state }, obs)
    }

    pub fn reset(&mut self, seed: u64) -> Observation {
        let (state, obs) = reset(self.spec, self.mode, seed);
        self.state = state;
        obs
    }

    pub fn step(&mut self, command: &ActionCommand) -> Result<Observation, EngineError> {
        let (state, obs) = step(&self.state, self.spec, self.mode, command)?;
        self.state = state;
        Ok(obs)
    }

    pub fn step_text(&mut self, text: &str) -> Result<Observation, EngineError> {
        let (state, obs) = step_text(&self.state, self.spec, self.mode, text)?;
        self.state = state;
        Ok(obs)
    }

    pub fn state(&self) -> &WorldState {
        &self.state
    }

    pub fn spec(&self) -> &'a GameSpec {
        self.spec
    }

    pub fn mode(&self) -> GameMode {
        self.mode
    }

    pub fn render(&self) -> String {
        render(&self.state, self.spec, self.mode)
    }
}
