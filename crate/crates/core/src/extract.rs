//! Rule-based information extraction from observation text into belief
//! triples.
//!
//! Extraction runs sentence by sentence. Each sentence is matched against the
//! ordered pattern list (a sentence may match several patterns) and then the
//! default rule adds `<noun, In, location>` for every object noun the lexicon
//! recognizes. Nouns missing from the lexicon are ignored.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::world::GameSpec;

const DETERMINERS: [&str; 4] = ["a", "an", "the", "some"];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExtractError {
    #[error("entity phrase {0:?} is empty after stripping articles")]
    EmptyEntity(String),
    #[error("unknown relation label {0:?}")]
    UnknownRelation(String),
    #[error("unknown triple source {0:?}")]
    UnknownSource(String),
}

#[derive(Debug, Error)]
pub enum RulesError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: noun {phrase:?} maps to both {first} and {second}")]
    Collision {
        line: usize,
        phrase: String,
        first: EntityId,
        second: EntityId,
    },
}

/// Canonical entity name: lowercase, articles stripped, words joined by `_`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntityId(String);

impl EntityId {
    /// Wraps an id that is already canonical.
    pub fn new(id: impl Into<String>) -> Self {
        let id = id.into();
        debug_assert!(!id.is_empty() && !id.contains(char::is_whitespace));
        EntityId(id)
    }

    /// The reserved id for the player character.
    pub fn player() -> Self {
        EntityId("player".to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Human-readable form: underscores become spaces.
    pub fn display(&self) -> String {
        self.0.replace('_', " ")
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for EntityId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Lowercases, strips leading articles and joins the remaining words with
/// underscores. Idempotent.
pub fn canonicalize(phrase: &str) -> Result<EntityId, ExtractError> {
    let words: Vec<String> = phrase
        .split(|c: char| c.is_whitespace() || c == '_')
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect();
    let start = words
        .iter()
        .position(|w| !DETERMINERS.contains(&w.as_str()))
        .unwrap_or(words.len());
    if start == words.len() {
        return Err(ExtractError::EmptyEntity(phrase.to_string()));
    }
    Ok(EntityId(words[start..].join("_")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationLabel {
    In,
    On,
    Has,
    HasA,
    ExitTo,
    AttributeOf,
    Wearing,
}

impl RelationLabel {
    pub const ALL: [RelationLabel; 7] = [
        RelationLabel::In,
        RelationLabel::On,
        RelationLabel::Has,
        RelationLabel::HasA,
        RelationLabel::ExitTo,
        RelationLabel::AttributeOf,
        RelationLabel::Wearing,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RelationLabel::In => "In",
            RelationLabel::On => "On",
            RelationLabel::Has => "Has",
            RelationLabel::HasA => "HasA",
            RelationLabel::ExitTo => "ExitTo",
            RelationLabel::AttributeOf => "AttributeOf",
            RelationLabel::Wearing => "Wearing",
        }
    }
}

impl fmt::Display for RelationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationLabel {
    type Err = ExtractError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RelationLabel::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| ExtractError::UnknownRelation(s.to_string()))
    }
}

/// Where a triple came from. Ordering puts `Observed` first, which is the
/// precedence used when duplicates are merged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Source {
    Observed,
    InferredHasA,
    InferredQA,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Observed => "Observed",
            Source::InferredHasA => "InferredHasA",
            Source::InferredQA => "InferredQA",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Source {
    type Err = ExtractError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Source::Observed, Source::InferredHasA, Source::InferredQA]
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| ExtractError::UnknownSource(s.to_string()))
    }
}

/// A `<subject, relation, object>` belief atom.
///
/// Equality, hashing and ordering ignore `source`.
#[derive(Debug, Clone)]
pub struct Triple {
    pub subject: EntityId,
    pub relation: RelationLabel,
    pub object: EntityId,
    pub source: Source,
}

impl Triple {
    pub fn new(subject: EntityId, relation: RelationLabel, object: EntityId, source: Source) -> Self {
        Triple {
            subject,
            relation,
            object,
            source,
        }
    }

    pub fn observed(subject: &str, relation: RelationLabel, object: &str) -> Self {
        Triple::new(
            EntityId::new(subject),
            relation,
            EntityId::new(object),
            Source::Observed,
        )
    }

    pub fn key(&self) -> (&EntityId, RelationLabel, &EntityId) {
        (&self.subject, self.relation, &self.object)
    }

    pub fn mentions(&self, e: &EntityId) -> bool {
        &self.subject == e || &self.object == e
    }
}

impl PartialEq for Triple {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Triple {}

impl Hash for Triple {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

impl PartialOrd for Triple {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Triple {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}",
            self.subject, self.relation, self.object, self.source
        )
    }
}

/// The relation a pattern produces and how its slots map onto the triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternKind {
    /// `on the {W} are {LIST}`: each item is On W.
    Listing,
    /// `{A} lies to the {DIR}`: location ExitTo A.
    Exit,
    /// `{X} can be found in {Y}`: each X is In Y.
    Containment,
    /// `you are wearing {LIST}`: player Wearing each item.
    Wearing,
    /// `you are carrying {LIST}`: player Has each item.
    Carrying,
}

impl PatternKind {
    fn parse(tag: &str) -> Option<Self> {
        Some(match tag {
            "@listing" => PatternKind::Listing,
            "@exit" => PatternKind::Exit,
            "@containment" => PatternKind::Containment,
            "@wearing" => PatternKind::Wearing,
            "@carrying" => PatternKind::Carrying,
            _ => return None,
        })
    }

    fn required_slots(self) -> &'static [&'static str] {
        match self {
            PatternKind::Listing => &["W", "LIST"],
            PatternKind::Exit => &["A"],
            PatternKind::Containment => &["X", "Y"],
            PatternKind::Wearing | PatternKind::Carrying => &["LIST"],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum PatToken {
    Word(String),
    Comma,
    Slot(String),
}

#[derive(Debug, Clone)]
pub struct Pattern {
    pub kind: PatternKind,
    tokens: Vec<PatToken>,
}

impl Pattern {
    pub fn new(kind: PatternKind, template: &str) -> Result<Self, String> {
        let mut tokens = Vec::new();
        for raw in template.split_whitespace() {
            if let Some(name) = raw.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
                tokens.push(PatToken::Slot(name.to_string()));
            } else if raw == "," {
                tokens.push(PatToken::Comma);
            } else {
                tokens.push(PatToken::Word(raw.to_lowercase()));
            }
        }
        for slot in kind.required_slots() {
            if !tokens.contains(&PatToken::Slot(slot.to_string())) {
                return Err(format!("pattern {template:?} lacks slot {{{slot}}}"));
            }
        }
        for w in tokens.windows(2) {
            if matches!(w, [PatToken::Slot(_), PatToken::Slot(_)]) {
                return Err(format!("pattern {template:?} has adjacent slots"));
            }
        }
        Ok(Pattern { kind, tokens })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NounKind {
    Object,
    Room,
    Player,
}

/// Ordered patterns plus the noun lexicon.
#[derive(Debug, Clone, Default)]
pub struct ExtractionRules {
    patterns: Vec<Pattern>,
    lexicon: HashMap<String, (EntityId, NounKind)>,
    rooms: BTreeSet<EntityId>,
    max_phrase_words: usize,
}

impl ExtractionRules {
    pub fn load(path: &Path) -> Result<Self, RulesError> {
        let text = std::fs::read_to_string(path).map_err(|source| RulesError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Parses the line-oriented rules format: `@kind<TAB>template` pattern
    /// records, `@room<TAB>entity` and `@player<TAB>phrase` declarations, and
    /// `phrase<TAB>entity` lexicon records. `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self, RulesError> {
        let mut rules = ExtractionRules::default();
        let mut declared: Vec<(String, EntityId, usize)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = raw.split('\t').map(str::trim).collect();
            if fields.len() != 2 || fields[1].is_empty() {
                return Err(RulesError::Syntax {
                    line,
                    message: format!("expected two tab-separated fields, got {raw:?}"),
                });
            }
            let (head, value) = (fields[0], fields[1]);
            let syntax = |message: String| RulesError::Syntax { line, message };
            match head {
                "@room" => {
                    let id = canonicalize(value).map_err(|e| syntax(e.to_string()))?;
                    rules.rooms.insert(id);
                }
                "@player" => {
                    let phrase = normalize_phrase(value);
                    rules.insert_noun(&mut declared, line, phrase, EntityId::player())?;
                }
                tag if tag.starts_with('@') => {
                    let kind = PatternKind::parse(tag)
                        .ok_or_else(|| syntax(format!("unknown pattern kind {tag:?}")))?;
                    rules
                        .patterns
                        .push(Pattern::new(kind, value).map_err(syntax)?);
                }
                phrase => {
                    let id = canonicalize(value).map_err(|e| syntax(e.to_string()))?;
                    rules.insert_noun(&mut declared, line, normalize_phrase(phrase), id)?;
                }
            }
        }
        // Room declarations may follow the nouns that name them.
        for (id, kind) in rules.lexicon.values_mut() {
            if *kind == NounKind::Object && rules.rooms.contains(id) {
                *kind = NounKind::Room;
            }
        }
        Ok(rules)
    }

    fn insert_noun(
        &mut self,
        declared: &mut Vec<(String, EntityId, usize)>,
        line: usize,
        phrase: String,
        id: EntityId,
    ) -> Result<(), RulesError> {
        if let Some((_, first, _)) = declared.iter().find(|(p, _, _)| *p == phrase) {
            if *first != id {
                return Err(RulesError::Collision {
                    line,
                    phrase,
                    first: first.clone(),
                    second: id,
                });
            }
            return Ok(());
        }
        let kind = if id == EntityId::player() {
            NounKind::Player
        } else {
            NounKind::Object
        };
        self.max_phrase_words = self.max_phrase_words.max(phrase.split(' ').count());
        self.lexicon.insert(phrase.clone(), (id.clone(), kind));
        declared.push((phrase, id, line));
        Ok(())
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn lookup(&self, phrase: &str) -> Option<&EntityId> {
        self.lexicon.get(&normalize_phrase(phrase)).map(|(id, _)| id)
    }

    /// Every entity id the lexicon can produce, sorted.
    pub fn entities(&self) -> Vec<EntityId> {
        let set: std::collections::BTreeSet<&EntityId> = self.lexicon.values().map(|(id, _)| id).collect();
        set.into_iter().cloned().collect()
    }

    pub fn is_room(&self, id: &EntityId) -> bool {
        self.rooms.contains(id)
    }

    /// Object noun phrases and room ids of `spec` that the lexicon does not
    /// cover. Missing coverage is a warning, not an error.
    pub fn coverage_warnings(&self, spec: &GameSpec) -> Vec<String> {
        let mut missing = Vec::new();
        for obj in spec.objects() {
            for noun in &obj.nouns {
                match self.lookup(noun) {
                    Some(id) if id == &obj.id => {}
                    _ => missing.push(format!("noun {noun:?} (object {})", obj.id)),
                }
            }
        }
        for room in spec.rooms() {
            if !self.rooms.contains(&room.id) {
                missing.push(format!("room {}", room.id));
            }
        }
        missing
    }

    /// Finds lexicon phrases in `words`, longest match first, left to right,
    /// without overlap.
    fn scan<'a>(&'a self, words: &[&str]) -> Vec<(&'a EntityId, NounKind)> {
        let mut found = Vec::new();
        let mut i = 0;
        while i < words.len() {
            let longest = (1..=self.max_phrase_words.min(words.len() - i))
                .rev()
                .find_map(|len| {
                    let key = words[i..i + len].join(" ");
                    self.lexicon.get(&key).map(|(id, kind)| (len, id, *kind))
                });
            match longest {
                Some((len, id, kind)) => {
                    found.push((id, kind));
                    i += len;
                }
                None => i += 1,
            }
        }
        found
    }

    fn resolve_slot<'a>(&'a self, words: &[&str]) -> Vec<&'a EntityId> {
        let mut out: Vec<&EntityId> = Vec::new();
        for (id, kind) in self.scan(words) {
            if kind != NounKind::Player && !out.contains(&id) {
                out.push(id);
            }
        }
        out
    }
}

fn normalize_phrase(phrase: &str) -> String {
    phrase
        .split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Splits text into sentences of lowercase word tokens. Commas are kept as
/// their own `,` token so patterns can anchor on them.
fn sentences(text: &str) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    let mut current: Vec<String> = Vec::new();
    let mut word = String::new();
    let flush_word = |word: &mut String, current: &mut Vec<String>| {
        if !word.is_empty() {
            current.push(std::mem::take(word));
        }
    };
    for c in text.chars() {
        if c.is_alphanumeric() || c == '\'' {
            word.extend(c.to_lowercase());
        } else {
            flush_word(&mut word, &mut current);
            match c {
                ',' => current.push(",".to_string()),
                '.' | '!' | '?' | ';' | '\n' if !current.is_empty() => {
                    out.push(std::mem::take(&mut current));
                }
                _ => {}
            }
        }
    }
    flush_word(&mut word, &mut current);
    if !current.is_empty() {
        out.push(current);
    }
    out
}

/// Matches a pattern somewhere in the sentence. A leading slot starts at the
/// sentence start and a trailing slot runs to the sentence end; `{DIR}`
/// captures exactly one word.
fn match_pattern<'t, 's>(
    tokens: &'t [PatToken],
    words: &'s [&'s str],
) -> Vec<HashMap<&'t str, &'s [&'s str]>> {
    fn go<'s>(
        tokens: &[PatToken],
        words: &'s [&'s str],
        pos: usize,
        caps: &mut Vec<(usize, usize, usize)>,
        out: &mut Vec<Vec<(usize, usize, usize)>>,
        first: bool,
    ) {
        let Some((tok, rest)) = tokens.split_first() else {
            out.push(caps.clone());
            return;
        };
        match tok {
            PatToken::Word(_) | PatToken::Comma => {
                let want = match tok {
                    PatToken::Word(w) => w.as_str(),
                    _ => ",",
                };
                let starts: Vec<usize> = if first {
                    (0..words.len()).collect()
                } else {
                    vec![pos]
                };
                for s in starts {
                    if words.get(s) == Some(&want) {
                        go(rest, words, s + 1, caps, out, false);
                    }
                }
            }
            PatToken::Slot(name) => {
                let idx = tokens.len();
                let dir = name == "DIR";
                let lens: Vec<usize> = if dir {
                    vec![1]
                } else if rest.is_empty() {
                    vec![words.len().saturating_sub(pos)]
                } else {
                    (1..=words.len().saturating_sub(pos)).collect()
                };
                for len in lens {
                    if len == 0 || pos + len > words.len() {
                        continue;
                    }
                    caps.push((idx, pos, pos + len));
                    go(rest, words, pos + len, caps, out, false);
                    caps.pop();
                }
            }
        }
    }

    let mut raw = Vec::new();
    go(tokens, words, 0, &mut Vec::new(), &mut raw, true);
    raw.into_iter()
        .map(|caps| {
            caps.into_iter()
                .map(|(remaining, a, b)| {
                    let name = match &tokens[tokens.len() - remaining] {
                        PatToken::Slot(n) => n.as_str(),
                        _ => unreachable!("captures are recorded for slots only"),
                    };
                    (name, &words[a..b])
                })
                .collect()
        })
        .collect()
}

/// Extracts observed triples from `text` at `location`.
///
/// Pure in `(text, location, rules)`; the result is deduplicated and keeps
/// first-discovery order.
pub fn extract(text: &str, location: &EntityId, rules: &ExtractionRules) -> Vec<Triple> {
    let mut out: Vec<Triple> = Vec::new();
    let mut push = |t: Triple| {
        if !out.contains(&t) {
            out.push(t);
        }
    };
    let player = EntityId::player();
    for sentence in sentences(text) {
        let words: Vec<&str> = sentence.iter().map(String::as_str).collect();
        for pattern in &rules.patterns {
            for caps in match_pattern(&pattern.tokens, &words) {
                let slot = |name: &str| {
                    caps.get(name)
                        .map(|w| rules.resolve_slot(w))
                        .unwrap_or_default()
                };
                let produced: Vec<Triple> = match pattern.kind {
                    PatternKind::Listing => {
                        let (support, items) = (slot("W"), slot("LIST"));
                        match support.first() {
                            Some(w) => items
                                .iter()
                                .map(|i| obs((*i).clone(), RelationLabel::On, (*w).clone()))
                                .collect(),
                            None => Vec::new(),
                        }
                    }
                    PatternKind::Exit => slot("A")
                        .last()
                        .map(|a| vec![obs(location.clone(), RelationLabel::ExitTo, (*a).clone())])
                        .unwrap_or_default(),
                    PatternKind::Containment => {
                        let (items, container) = (slot("X"), slot("Y"));
                        match container.first() {
                            Some(y) => items
                                .iter()
                                .map(|i| obs((*i).clone(), RelationLabel::In, (*y).clone()))
                                .collect(),
                            None => Vec::new(),
                        }
                    }
                    PatternKind::Wearing => slot("LIST")
                        .iter()
                        .map(|i| obs(player.clone(), RelationLabel::Wearing, (*i).clone()))
                        .collect(),
                    PatternKind::Carrying => slot("LIST")
                        .iter()
                        .map(|i| obs(player.clone(), RelationLabel::Has, (*i).clone()))
                        .collect(),
                };
                if !produced.is_empty() {
                    produced.into_iter().for_each(&mut push);
                    break;
                }
            }
        }
        for (id, kind) in rules.scan(&words) {
            if kind == NounKind::Object && id != location {
                push(obs(id.clone(), RelationLabel::In, location.clone()));
            }
        }
    }
    out
}

fn obs(subject: EntityId, relation: RelationLabel, object: EntityId) -> Triple {
    Triple::new(subject, relation, object, Source::Observed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    const RULES: &str = "\
# patterns
@listing\ton the {W} are {LIST}
@exit\t{A} lies to the {DIR}
@exit\ta door to the {DIR} leads to {A}
@containment\t{X} can be found in {Y}
@wearing\tyou are wearing {LIST}
@room\tbedroom
@room\tbathroom
@room\tliving room
@player\tyou
bedroom\tbedroom
bathroom\tbathroom
living room\tliving room
end table\tend table
telephone\ttelephone
phone\ttelephone
wallet\twallet
keys\tkeys
dresser\tdresser
cleaner clothing\tclean clothes
watch\twatch
soiled clothes\tsoiled clothes
";

    fn rules() -> ExtractionRules {
        ExtractionRules::parse(RULES).unwrap()
    }

    fn set(ts: Vec<Triple>) -> BTreeSet<Triple> {
        ts.into_iter().collect()
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(canonicalize("the end table").unwrap().as_str(), "end_table");
        assert_eq!(canonicalize("Keys").unwrap().as_str(), "keys");
        assert!(canonicalize("a ").is_err());
        assert!(canonicalize("   ").is_err());
    }

    #[test]
    fn relation_labels_round_trip() {
        for r in RelationLabel::ALL {
            assert_eq!(r.as_str().parse::<RelationLabel>().unwrap(), r);
        }
        assert!("Likes".parse::<RelationLabel>().is_err());
    }

    #[test]
    fn triple_equality_ignores_source() {
        let a = Triple::observed("sink", RelationLabel::In, "bathroom");
        let mut b = a.clone();
        b.source = Source::InferredHasA;
        assert_eq!(a, b);
    }

    #[test]
    fn listing_sentence() {
        let bedroom = EntityId::new("bedroom");
        let got = extract(
            "On the end table are a telephone, a wallet and some keys.",
            &bedroom,
            &rules(),
        );
        let want = set(vec![
            Triple::observed("telephone", RelationLabel::On, "end_table"),
            Triple::observed("wallet", RelationLabel::On, "end_table"),
            Triple::observed("keys", RelationLabel::On, "end_table"),
            Triple::observed("end_table", RelationLabel::In, "bedroom"),
            Triple::observed("telephone", RelationLabel::In, "bedroom"),
            Triple::observed("wallet", RelationLabel::In, "bedroom"),
            Triple::observed("keys", RelationLabel::In, "bedroom"),
        ]);
        assert_eq!(got.len(), want.len());
        assert_eq!(set(got), want);
    }

    #[test]
    fn exit_sentence() {
        let got = extract("A bathroom lies to the south", &EntityId::new("bedroom"), &rules());
        assert_eq!(
            got,
            vec![Triple::observed("bedroom", RelationLabel::ExitTo, "bathroom")]
        );
    }

    #[test]
    fn empty_and_unmatched_text() {
        let r = rules();
        let loc = EntityId::new("bedroom");
        assert!(extract("", &loc, &r).is_empty());
        assert!(extract("Nothing to see but a potted fern.", &loc, &r).is_empty());
    }

    #[test]
    fn wearing_maps_to_player() {
        let got = extract(
            "You are wearing a watch and soiled clothes.",
            &EntityId::new("bedroom"),
            &rules(),
        );
        assert!(got.contains(&Triple::observed("player", RelationLabel::Wearing, "watch")));
        assert!(got.contains(&Triple::observed(
            "player",
            RelationLabel::Wearing,
            "soiled_clothes"
        )));
        assert!(got.iter().all(|t| t.source == Source::Observed));
        assert!(!got.iter().any(|t| t.subject == EntityId::player() && t.relation == RelationLabel::In));
    }

    #[test]
    fn second_exit_form_and_containment() {
        let got = set(extract(
            "A bathroom lies to the south,while a door to the east leads to the living room. Cleaner clothing can be found in the dresser.",
            &EntityId::new("bedroom"),
            &rules(),
        ));
        assert!(got.contains(&Triple::observed("bedroom", RelationLabel::ExitTo, "living_room")));
        assert!(got.contains(&Triple::observed("clean_clothes", RelationLabel::In, "dresser")));
        assert!(got.contains(&Triple::observed("clean_clothes", RelationLabel::In, "bedroom")));
    }

    #[test]
    fn collision_is_an_error() {
        let err = ExtractionRules::parse("phone\ttelephone\nphone\tcellphone\n").unwrap_err();
        assert!(matches!(err, RulesError::Collision { line: 2, .. }), "{err}");
        // The same mapping twice is harmless.
        assert!(ExtractionRules::parse("phone\ttelephone\nphone\ttelephone\n").is_ok());
    }

    #[test]
    fn malformed_rules_lines() {
        assert!(matches!(
            ExtractionRules::parse("@bogus\tfoo {X}").unwrap_err(),
            RulesError::Syntax { line: 1, .. }
        ));
        assert!(matches!(
            ExtractionRules::parse("# ok\n@listing\ton the {W} are").unwrap_err(),
            RulesError::Syntax { line: 2, .. }
        ));
        assert!(matches!(
            ExtractionRules::parse("lonely").unwrap_err(),
            RulesError::Syntax { line: 1, .. }
        ));
    }
}
