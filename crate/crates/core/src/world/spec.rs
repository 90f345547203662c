use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use thiserror::Error;

use crate::command::{command_words, ActionCommand, CommandTemplate};
use crate::extract::{canonicalize, EntityId};

pub const WALKTHROUGH_MIN: usize = 25;
pub const WALKTHROUGH_MAX: usize = 30;
pub const CHECKPOINT_COUNT: u8 = 6;

/// Checkpoint names, in ordinal order.
pub const CHECKPOINT_NAMES: [&str; 6] = [
    "enter-bedroom",
    "enter-bathroom",
    "remove-watch",
    "remove-soiled-clothes",
    "drop-clothes",
    "enter-shower",
];

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line} ({record}): {message}")]
    Syntax {
        line: usize,
        record: String,
        message: String,
    },
    #[error("missing section [{0}]")]
    MissingSection(&'static str),
    #[error("{record} references undeclared room {room:?}")]
    DanglingRoom { record: String, room: String },
    #[error("{record} references undeclared object {object:?}")]
    DanglingObject { record: String, object: String },
    #[error("{record} references undeclared verb {verb:?}")]
    DanglingVerb { record: String, verb: String },
    #[error("walkthrough length {0} outside [{WALKTHROUGH_MIN},{WALKTHROUGH_MAX}]")]
    WalkthroughLength(usize),
    #[error("walkthrough command {index} {command:?} does not parse")]
    WalkthroughParse { index: usize, command: String },
    #[error("checkpoints: {0}")]
    Checkpoints(String),
    #[error("room {room}: text {text:?} mentions ablated noun {noun:?}")]
    AblationLeak {
        room: String,
        text: String,
        noun: String,
    },
}

#[derive(Debug, Clone)]
pub struct Room {
    pub id: EntityId,
    /// Base description. May contain `{on:<support>}` placeholders that
    /// render the objects currently on that support.
    pub description: String,
    pub exits: Vec<(String, EntityId)>,
    /// Objects whose mentions are dropped from this room's text in ablated
    /// mode.
    pub ablate: Vec<EntityId>,
}

impl Room {
    pub fn exit(&self, direction: &str) -> Option<&EntityId> {
        self.exits
            .iter()
            .find(|(d, _)| d == direction)
            .map(|(_, r)| r)
    }
}

/// Where an object starts the game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Placement {
    Room(EntityId),
    Player,
}

#[derive(Debug, Clone)]
pub struct ObjectSpec {
    pub id: EntityId,
    /// Noun phrases that refer to the object; the first is its display name.
    pub nouns: Vec<String>,
    pub placement: Placement,
    pub on: Option<EntityId>,
    pub inside: Option<EntityId>,
    pub portable: bool,
    pub wearable: bool,
    pub worn: bool,
    pub container: bool,
    pub article: Option<String>,
    pub mention: Option<String>,
    pub mention_unless: Option<String>,
    pub examine: Option<String>,
}

impl ObjectSpec {
    pub fn name(&self) -> &str {
        &self.nouns[0]
    }

    /// Name with its indefinite article, e.g. `some keys`.
    pub fn with_article(&self) -> String {
        match &self.article {
            Some(a) => format!("{a} {}", self.name()),
            None => self.name().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Effect {
    Move(String),
    Look,
    Inventory,
    Wait,
    SelfDescribe,
    Examine,
    Take,
    Drop,
    Remove,
    Wear,
    Open,
    Put,
    /// Behaviour comes entirely from `rule` records.
    Action,
}

/// Which known entities may fill a template slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotRule {
    /// Believed to be in the current location.
    Local,
    /// Believed to be held or worn by the player.
    Carried,
    /// Believed to be worn by the player.
    Worn,
    LocalOrCarried,
}

impl SlotRule {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "local" => SlotRule::Local,
            "carried" => SlotRule::Carried,
            "worn" => SlotRule::Worn,
            "local_or_carried" => SlotRule::LocalOrCarried,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone)]
pub struct VerbSpec {
    pub name: String,
    pub template: CommandTemplate,
    pub effect: Effect,
    pub slots: Vec<SlotRule>,
    pub default_text: Option<String>,
}

impl VerbSpec {
    pub fn arity(&self) -> usize {
        self.template.arity()
    }
}

/// A precondition; `holds == false` negates it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition {
    Flag(String, bool),
    Worn(EntityId, bool),
    Carried(EntityId, bool),
    At(EntityId, bool),
}

/// Guard and outcome for one (verb, object) pair.
#[derive(Debug, Clone)]
pub struct RuleSpec {
    pub verb: String,
    pub object: Option<EntityId>,
    pub requires: Vec<Condition>,
    pub refuse: Option<String>,
    pub sets: Vec<String>,
    pub text: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Trigger {
    /// The player arrives in the room.
    EnterRoom(EntityId),
    /// The object goes from worn to not worn.
    Unworn(EntityId),
    /// The object leaves the player's possession.
    Dropped(EntityId),
    /// The flag becomes set.
    Flag(String),
}

#[derive(Debug, Clone)]
pub struct RewardCheckpoint {
    pub ordinal: u8,
    pub name: String,
    pub trigger: Trigger,
}

#[derive(Debug, Clone, Default)]
pub struct Distractors {
    pub objects: Vec<EntityId>,
    pub verbs: Vec<String>,
}

/// A validated game description.
#[derive(Debug, Clone)]
pub struct GameSpec {
    rooms: Vec<Room>,
    objects: Vec<ObjectSpec>,
    verbs: Vec<VerbSpec>,
    rules: Vec<RuleSpec>,
    checkpoints: Vec<RewardCheckpoint>,
    goal: Trigger,
    walkthrough: Vec<String>,
    distractors: Distractors,
    noun_index: HashMap<String, EntityId>,
}

impl GameSpec {
    pub fn load(path: &Path) -> Result<Self, SpecError> {
        let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, SpecError> {
        let raw = RawSpec::parse(text)?;
        raw.build()
    }

    pub fn rooms(&self) -> &[Room] {
        &self.rooms
    }

    pub fn room(&self, id: &EntityId) -> Option<&Room> {
        self.rooms.iter().find(|r| &r.id == id)
    }

    /// The first declared room is where the player wakes up.
    pub fn start_room(&self) -> &Room {
        &self.rooms[0]
    }

    pub fn objects(&self) -> &[ObjectSpec] {
        &self.objects
    }

    pub fn object(&self, id: &EntityId) -> Option<&ObjectSpec> {
        self.objects.iter().find(|o| &o.id == id)
    }

    pub fn verbs(&self) -> &[VerbSpec] {
        &self.verbs
    }

    pub fn verb(&self, name: &str) -> Option<&VerbSpec> {
        self.verbs.iter().find(|v| v.name == name)
    }

    pub fn rules(&self) -> &[RuleSpec] {
        &self.rules
    }

    pub fn rule(&self, verb: &str, object: Option<&EntityId>) -> Option<&RuleSpec> {
        self.rules
            .iter()
            .find(|r| r.verb == verb && r.object.as_ref() == object)
    }

    pub fn checkpoints(&self) -> &[RewardCheckpoint] {
        &self.checkpoints
    }

    pub fn goal(&self) -> &Trigger {
        &self.goal
    }

    pub fn walkthrough(&self) -> &[String] {
        &self.walkthrough
    }

    pub fn distractors(&self) -> &Distractors {
        &self.distractors
    }

    /// Number of no-op (verb, object) pairs on the distractor surface.
    pub fn distractor_pairs(&self) -> usize {
        let unary = self
            .distractors
            .verbs
            .iter()
            .filter(|v| self.verb(v).is_some_and(|v| v.arity() == 1))
            .count();
        unary * self.distractors.objects.len()
    }

    pub fn templates(&self) -> Vec<CommandTemplate> {
        self.verbs.iter().map(|v| v.template.clone()).collect()
    }

    /// Every entity the game can name: rooms, objects and the player.
    pub fn entities(&self) -> Vec<EntityId> {
        let mut out: Vec<EntityId> = self.rooms.iter().map(|r| r.id.clone()).collect();
        out.extend(self.objects.iter().map(|o| o.id.clone()));
        out.push(EntityId::player());
        out
    }

    /// Parses command text against the declared verb templates, resolving
    /// each slot through the objects' noun phrases.
    pub fn parse_command(&self, text: &str) -> Option<ActionCommand> {
        let words = command_words(text);
        self.verbs.iter().find_map(|v| {
            let captures = v.template.match_words(&words)?;
            let args = captures
                .iter()
                .map(|span| self.noun_index.get(&span.join(" ")).cloned())
                .collect::<Option<Vec<_>>>()?;
            Some(ActionCommand::new(&v.template, args))
        })
    }

    /// Returns a copy keeping only the first `objects` distractor objects and
    /// the first `verbs` distractor verbs. Distractors the walkthrough needs,
    /// and supports or containers of kept objects, are always kept.
    pub fn with_distractor_limit(&self, objects: usize, verbs: usize) -> Result<Self, SpecError> {
        let walk: Vec<ActionCommand> = self
            .walkthrough
            .iter()
            .filter_map(|c| self.parse_command(c))
            .collect();
        let needed_verbs: BTreeSet<&str> = walk.iter().map(|c| c.verb.as_str()).collect();
        let mut needed_objects: BTreeSet<EntityId> =
            walk.iter().flat_map(|c| c.args.iter().cloned()).collect();
        for r in &self.rules {
            needed_objects.extend(r.object.iter().cloned());
        }
        for r in &self.rooms {
            needed_objects.extend(r.ablate.iter().cloned());
        }

        let drop_objects: BTreeSet<EntityId> = self
            .distractors
            .objects
            .iter()
            .skip(objects)
            .filter(|o| !needed_objects.contains(*o))
            .filter(|o| {
                !self.objects.iter().any(|other| {
                    other.on.as_ref() == Some(*o) || other.inside.as_ref() == Some(*o)
                }) && !self
                    .rooms
                    .iter()
                    .any(|r| r.description.contains(&format!("{{on:{o}}}")))
            })
            .cloned()
            .collect();
        let drop_verbs: BTreeSet<String> = self
            .distractors
            .verbs
            .iter()
            .skip(verbs)
            .filter(|v| !needed_verbs.contains(v.as_str()))
            .cloned()
            .collect();

        let mut out = self.clone();
        out.objects.retain(|o| !drop_objects.contains(&o.id));
        out.verbs.retain(|v| !drop_verbs.contains(&v.name));
        out.rules
            .retain(|r| !drop_verbs.contains(&r.verb) && r.object.as_ref().is_none_or(|o| !drop_objects.contains(o)));
        out.distractors.objects.retain(|o| !drop_objects.contains(o));
        out.distractors.verbs.retain(|v| !drop_verbs.contains(v));
        out.noun_index.retain(|_, id| !drop_objects.contains(id));
        out.validate()?;
        Ok(out)
    }

    fn validate(&self) -> Result<(), SpecError> {
        let room_ids: BTreeSet<&EntityId> = self.rooms.iter().map(|r| &r.id).collect();
        let object_ids: BTreeSet<&EntityId> = self.objects.iter().map(|o| &o.id).collect();
        let dangling_room = |record: String, room: &EntityId| SpecError::DanglingRoom {
            record,
            room: room.to_string(),
        };
        let dangling_object = |record: String, object: &EntityId| SpecError::DanglingObject {
            record,
            object: object.to_string(),
        };

        if self.rooms.is_empty() {
            return Err(SpecError::MissingSection("rooms"));
        }
        for room in &self.rooms {
            for (_, dest) in &room.exits {
                if !room_ids.contains(dest) {
                    return Err(dangling_room(format!("room {}", room.id), dest));
                }
            }
            for o in &room.ablate {
                if !object_ids.contains(o) {
                    return Err(dangling_object(format!("room {}", room.id), o));
                }
            }
        }
        for obj in &self.objects {
            let record = format!("object {}", obj.id);
            if let Placement::Room(r) = &obj.placement {
                if !room_ids.contains(r) {
                    return Err(dangling_room(record, r));
                }
            }
            for holder in obj.on.iter().chain(obj.inside.iter()) {
                if !object_ids.contains(holder) {
                    return Err(dangling_object(record, holder));
                }
            }
        }
        for verb in &self.verbs {
            if verb.slots.len() != verb.arity() {
                return Err(SpecError::Syntax {
                    line: 0,
                    record: format!("verb {}", verb.name),
                    message: format!(
                        "template has {} slots but {} slot rules",
                        verb.arity(),
                        verb.slots.len()
                    ),
                });
            }
        }
        for rule in &self.rules {
            let record = format!("rule {}", rule.verb);
            if self.verb(&rule.verb).is_none() {
                return Err(SpecError::DanglingVerb {
                    record,
                    verb: rule.verb.clone(),
                });
            }
            if let Some(o) = &rule.object {
                if !object_ids.contains(o) {
                    return Err(dangling_object(record, o));
                }
            }
            for c in &rule.requires {
                match c {
                    Condition::Worn(o, _) | Condition::Carried(o, _) if !object_ids.contains(o) => {
                        return Err(dangling_object(record, o))
                    }
                    Condition::At(r, _) if !room_ids.contains(r) => {
                        return Err(dangling_room(record, r))
                    }
                    _ => {}
                }
            }
        }

        let ordinals: Vec<u8> = self.checkpoints.iter().map(|c| c.ordinal).collect();
        let expected: Vec<u8> = (1..=CHECKPOINT_COUNT).collect();
        if ordinals != expected {
            return Err(SpecError::Checkpoints(format!(
                "ordinals must be exactly 1..{CHECKPOINT_COUNT} in order, got {ordinals:?}"
            )));
        }
        for cp in &self.checkpoints {
            let want = CHECKPOINT_NAMES[usize::from(cp.ordinal) - 1];
            if cp.name != want {
                return Err(SpecError::Checkpoints(format!(
                    "checkpoint {} must be named {want:?}, got {:?}",
                    cp.ordinal, cp.name
                )));
            }
        }
        for trigger in self
            .checkpoints
            .iter()
            .map(|c| &c.trigger)
            .chain(std::iter::once(&self.goal))
        {
            match trigger {
                Trigger::EnterRoom(r) if !room_ids.contains(r) => {
                    return Err(dangling_room("checkpoint".into(), r))
                }
                Trigger::Unworn(o) | Trigger::Dropped(o) if !object_ids.contains(o) => {
                    return Err(dangling_object("checkpoint".into(), o))
                }
                _ => {}
            }
        }

        let n = self.walkthrough.len();
        if !(WALKTHROUGH_MIN..=WALKTHROUGH_MAX).contains(&n) {
            return Err(SpecError::WalkthroughLength(n));
        }
        for (index, command) in self.walkthrough.iter().enumerate() {
            if self.parse_command(command).is_none() {
                return Err(SpecError::WalkthroughParse {
                    index,
                    command: command.clone(),
                });
            }
        }

        for o in &self.distractors.objects {
            if !object_ids.contains(o) {
                return Err(dangling_object("distractors".into(), o));
            }
        }
        for v in &self.distractors.verbs {
            if self.verb(v).is_none() {
                return Err(SpecError::DanglingVerb {
                    record: "distractors".into(),
                    verb: v.clone(),
                });
            }
        }

        self.check_ablation()
    }

    /// Nouns (with synonyms) hidden in `room` under ablation.
    pub fn ablated_nouns(&self, room: &Room) -> Vec<&str> {
        room.ablate
            .iter()
            .filter_map(|id| self.object(id))
            .flat_map(|o| o.nouns.iter().map(String::as_str))
            .collect()
    }

    fn check_ablation(&self) -> Result<(), SpecError> {
        for room in &self.rooms {
            let nouns = self.ablated_nouns(room);
            let mut texts = vec![room.description.clone()];
            texts.extend(
                self.objects
                    .iter()
                    .filter(|o| !room.ablate.contains(&o.id))
                    .filter(|o| o.placement == Placement::Room(room.id.clone()))
                    .filter_map(|o| o.mention.clone()),
            );
            for text in texts {
                let words = command_words(&text).join(" ");
                let padded = format!(" {words} ");
                if let Some(noun) = nouns.iter().find(|n| padded.contains(&format!(" {n} "))) {
                    return Err(SpecError::AblationLeak {
                        room: room.id.to_string(),
                        text,
                        noun: noun.to_string(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Line-level parse result before cross-reference validation.
struct RawSpec {
    spec: GameSpec,
    seen: BTreeSet<&'static str>,
}

impl RawSpec {
    fn parse(text: &str) -> Result<Self, SpecError> {
        let mut spec = GameSpec {
            rooms: Vec::new(),
            objects: Vec::new(),
            verbs: Vec::new(),
            rules: Vec::new(),
            checkpoints: Vec::new(),
            goal: Trigger::Flag(String::new()),
            walkthrough: Vec::new(),
            distractors: Distractors::default(),
            noun_index: HashMap::new(),
        };
        let mut seen = BTreeSet::new();
        let mut section: Option<&'static str> = None;
        let mut goal = None;

        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw_line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if let Some(name) = trimmed.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                let known = ["rooms", "objects", "verbs", "checkpoints", "walkthrough", "distractors"];
                let name = known.into_iter().find(|k| *k == name).ok_or_else(|| SpecError::Syntax {
                    line,
                    record: trimmed.to_string(),
                    message: "unknown section".into(),
                })?;
                seen.insert(name);
                section = Some(name);
                continue;
            }
            let fields: Vec<&str> = trimmed.split('|').map(str::trim).collect();
            let record = fields[0].to_string();
            let err = |message: String| SpecError::Syntax {
                line,
                record: record.clone(),
                message,
            };
            match section {
                None => return Err(err("record outside any section".into())),
                Some("rooms") => spec.rooms.push(parse_room(&fields).map_err(err)?),
                Some("objects") => spec.objects.push(parse_object(&fields).map_err(err)?),
                Some("verbs") => match fields[0] {
                    "verb" => spec.verbs.push(parse_verb(&fields).map_err(err)?),
                    "rule" => spec.rules.push(parse_rule(&fields).map_err(err)?),
                    other => return Err(err(format!("expected `verb` or `rule`, got {other:?}"))),
                },
                Some("checkpoints") => {
                    if fields.len() != 3 {
                        return Err(err("expected `ordinal | name | trigger`".into()));
                    }
                    let trigger = parse_trigger(fields[2]).map_err(err)?;
                    if fields[0] == "goal" {
                        goal = Some(trigger);
                    } else {
                        let ordinal = fields[0]
                            .parse::<u8>()
                            .map_err(|_| err(format!("bad ordinal {:?}", fields[0])))?;
                        spec.checkpoints.push(RewardCheckpoint {
                            ordinal,
                            name: fields[1].to_string(),
                            trigger,
                        });
                    }
                }
                Some("walkthrough") => spec.walkthrough.push(trimmed.to_string()),
                Some("distractors") => {
                    let (key, value) = trimmed
                        .split_once('=')
                        .ok_or_else(|| err("expected `objects = ...` or `verbs = ...`".into()))?;
                    let items = value.split(',').map(str::trim).filter(|s| !s.is_empty());
                    match key.trim() {
                        "objects" => {
                            for item in items {
                                spec.distractors
                                    .objects
                                    .push(canonicalize(item).map_err(|e| err(e.to_string()))?);
                            }
                        }
                        "verbs" => spec.distractors.verbs.extend(items.map(str::to_string)),
                        other => return Err(err(format!("unknown distractor key {other:?}"))),
                    }
                }
                Some(_) => unreachable!("section names are validated above"),
            }
        }
        spec.goal = goal.ok_or(SpecError::Checkpoints("missing `goal` trigger".into()))?;
        Ok(RawSpec { spec, seen })
    }

    fn build(self) -> Result<GameSpec, SpecError> {
        for name in ["rooms", "objects", "verbs", "checkpoints", "walkthrough"] {
            if !self.seen.contains(name) {
                return Err(SpecError::MissingSection(name));
            }
        }
        let mut spec = self.spec;
        for obj in &spec.objects {
            for noun in &obj.nouns {
                spec.noun_index.insert(command_words(noun).join(" "), obj.id.clone());
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

fn key_values<'a>(fields: &[&'a str]) -> Result<HashMap<&'a str, &'a str>, String> {
    fields
        .iter()
        .map(|f| {
            f.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| format!("expected key=value, got {f:?}"))
        })
        .collect()
}

fn entity(s: &str) -> Result<EntityId, String> {
    canonicalize(s).map_err(|e| e.to_string())
}

fn parse_room(fields: &[&str]) -> Result<Room, String> {
    let id = entity(fields[0])?;
    let kv = key_values(&fields[1..])?;
    let description = kv.get("desc").ok_or("room needs desc=")?.to_string();
    let mut exits = Vec::new();
    if let Some(list) = kv.get("exits") {
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (dir, dest) = item
                .split_once(':')
                .ok_or_else(|| format!("exit {item:?} is not dir:room"))?;
            exits.push((dir.trim().to_string(), entity(dest)?));
        }
    }
    let ablate = match kv.get("ablate") {
        Some(list) => list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(entity)
            .collect::<Result<_, _>>()?,
        None => Vec::new(),
    };
    Ok(Room {
        id,
        description,
        exits,
        ablate,
    })
}

fn parse_object(fields: &[&str]) -> Result<ObjectSpec, String> {
    let id = entity(fields[0])?;
    let kv = key_values(&fields[1..])?;
    let nouns: Vec<String> = kv
        .get("nouns")
        .ok_or("object needs nouns=")?
        .split(',')
        .map(|n| n.trim().to_lowercase())
        .filter(|n| !n.is_empty())
        .collect();
    if nouns.is_empty() {
        return Err("object needs at least one noun".into());
    }
    let at = kv.get("at").ok_or("object needs at=")?;
    let placement = if *at == "player" {
        Placement::Player
    } else {
        Placement::Room(entity(at)?)
    };
    let props: BTreeSet<&str> = kv
        .get("props")
        .map(|p| p.split(',').map(str::trim).collect())
        .unwrap_or_default();
    for p in &props {
        if !["portable", "wearable", "worn", "fixture", "container"].contains(p) {
            return Err(format!("unknown property {p:?}"));
        }
    }
    let worn = props.contains("worn");
    if worn && placement != Placement::Player {
        return Err("worn objects must start on the player".into());
    }
    let opt = |k: &str| kv.get(k).map(|s| s.to_string());
    Ok(ObjectSpec {
        id,
        nouns,
        placement,
        on: kv.get("on").map(|s| entity(s)).transpose()?,
        inside: kv.get("in").map(|s| entity(s)).transpose()?,
        portable: props.contains("portable"),
        wearable: props.contains("wearable"),
        worn,
        container: props.contains("container"),
        article: opt("article"),
        mention: opt("mention"),
        mention_unless: opt("mention_unless"),
        examine: opt("examine"),
    })
}

fn parse_verb(fields: &[&str]) -> Result<VerbSpec, String> {
    let name = fields.get(1).ok_or("verb needs a name")?.to_string();
    let kv = key_values(&fields[2..])?;
    let template = CommandTemplate::new(name.clone(), kv.get("template").ok_or("verb needs template=")?);
    let effect = match *kv.get("effect").ok_or("verb needs effect=")? {
        "look" => Effect::Look,
        "inventory" => Effect::Inventory,
        "wait" => Effect::Wait,
        "self" => Effect::SelfDescribe,
        "examine" => Effect::Examine,
        "take" => Effect::Take,
        "drop" => Effect::Drop,
        "remove" => Effect::Remove,
        "wear" => Effect::Wear,
        "open" => Effect::Open,
        "put" => Effect::Put,
        "action" => Effect::Action,
        other => match other.strip_prefix("move:") {
            Some(dir) if !dir.is_empty() => Effect::Move(dir.to_string()),
            _ => return Err(format!("unknown effect {other:?}")),
        },
    };
    let slots = match kv.get("slots") {
        Some(list) => list
            .split(',')
            .map(|s| SlotRule::parse(s.trim()).ok_or_else(|| format!("unknown slot rule {s:?}")))
            .collect::<Result<_, _>>()?,
        None => Vec::new(),
    };
    Ok(VerbSpec {
        name,
        template,
        effect,
        slots,
        default_text: kv.get("default").map(|s| s.to_string()),
    })
}

fn parse_condition(s: &str) -> Result<Condition, String> {
    let (holds, body) = match s.strip_prefix('!') {
        Some(rest) => (false, rest),
        None => (true, s),
    };
    let (kind, arg) = body
        .split_once(':')
        .ok_or_else(|| format!("condition {s:?} is not kind:arg"))?;
    Ok(match kind {
        "flag" => Condition::Flag(arg.to_string(), holds),
        "worn" => Condition::Worn(entity(arg)?, holds),
        "carried" => Condition::Carried(entity(arg)?, holds),
        "at" => Condition::At(entity(arg)?, holds),
        other => return Err(format!("unknown condition kind {other:?}")),
    })
}

fn parse_rule(fields: &[&str]) -> Result<RuleSpec, String> {
    if fields.len() < 3 {
        return Err("rule needs `rule | verb | object | ...`".into());
    }
    let object = match fields[2] {
        "-" => None,
        o => Some(entity(o)?),
    };
    let kv = key_values(&fields[3..])?;
    let requires = match kv.get("requires") {
        Some(list) => list
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(parse_condition)
            .collect::<Result<_, _>>()?,
        None => Vec::new(),
    };
    let sets = kv
        .get("sets")
        .map(|s| s.split(',').map(|f| f.trim().to_string()).collect())
        .unwrap_or_default();
    Ok(RuleSpec {
        verb: fields[1].to_string(),
        object,
        requires,
        refuse: kv.get("refuse").map(|s| s.to_string()),
        sets,
        text: kv.get("text").map(|s| s.to_string()),
    })
}

fn parse_trigger(s: &str) -> Result<Trigger, String> {
    let (kind, arg) = s
        .split_once(' ')
        .ok_or_else(|| format!("trigger {s:?} is not `kind arg`"))?;
    let arg = arg.trim();
    Ok(match kind {
        "enter" => Trigger::EnterRoom(entity(arg)?),
        "unworn" => Trigger::Unworn(entity(arg)?),
        "dropped" => Trigger::Dropped(entity(arg)?),
        "flag" => Trigger::Flag(arg.to_string()),
        other => return Err(format!("unknown trigger kind {other:?}")),
    })
}
