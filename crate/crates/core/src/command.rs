//! Action commands and the verb templates they are rendered from.

use std::fmt;

use crate::extract::{canonicalize, EntityId};

const ARTICLES: [&str; 4] = ["a", "an", "the", "some"];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Part {
    Word(String),
    Slot,
}

/// A verb's surface template, e.g. `wash hands in _` or `put _ on _`.
///
/// Each `_` is an argument slot. Literal words are matched case-insensitively.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandTemplate {
    verb: String,
    parts: Vec<Part>,
}

impl CommandTemplate {
    pub fn new(verb: impl Into<String>, template: &str) -> Self {
        let parts = template
            .split_whitespace()
            .map(|w| {
                if w == "_" {
                    Part::Slot
                } else {
                    Part::Word(w.to_lowercase())
                }
            })
            .collect();
        CommandTemplate {
            verb: verb.into(),
            parts,
        }
    }

    pub fn verb(&self) -> &str {
        &self.verb
    }

    pub fn arity(&self) -> usize {
        self.parts.iter().filter(|p| matches!(p, Part::Slot)).count()
    }

    /// Renders the surface text with each slot replaced by the display form
    /// of the corresponding argument.
    pub fn render(&self, args: &[EntityId]) -> String {
        let mut args = args.iter();
        let words: Vec<String> = self
            .parts
            .iter()
            .map(|p| match p {
                Part::Word(w) => w.clone(),
                Part::Slot => args
                    .next()
                    .map(EntityId::display)
                    .unwrap_or_else(|| "_".to_string()),
            })
            .collect();
        words.join(" ")
    }

    /// Matches already-tokenized command words, returning the word span
    /// captured by each slot. Every slot captures at least one word.
    pub fn match_words<'a>(&self, words: &'a [String]) -> Option<Vec<&'a [String]>> {
        let mut captures = Vec::with_capacity(self.arity());
        if match_parts(&self.parts, words, &mut captures) {
            Some(captures)
        } else {
            None
        }
    }
}

fn match_parts<'a>(parts: &[Part], words: &'a [String], captures: &mut Vec<&'a [String]>) -> bool {
    match parts.split_first() {
        None => words.is_empty(),
        Some((Part::Word(w), rest)) => {
            words.first().is_some_and(|first| first == w) && match_parts(rest, &words[1..], captures)
        }
        Some((Part::Slot, rest)) => {
            for end in 1..=words.len() {
                captures.push(&words[..end]);
                if match_parts(rest, &words[end..], captures) {
                    return true;
                }
                captures.pop();
            }
            false
        }
    }
}

/// Lowercases, splits on whitespace and drops articles.
pub fn command_words(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| {
            w.trim_matches(|c: char| !c.is_alphanumeric() && c != '\'')
                .to_lowercase()
        })
        .filter(|w| !w.is_empty() && !ARTICLES.contains(&w.as_str()))
        .collect()
}

/// One concrete command: a verb plus zero to two entity arguments.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionCommand {
    pub verb: String,
    pub args: Vec<EntityId>,
    pub surface: String,
}

impl ActionCommand {
    pub fn new(template: &CommandTemplate, args: Vec<EntityId>) -> Self {
        debug_assert_eq!(template.arity(), args.len());
        let surface = template.render(&args);
        ActionCommand {
            verb: template.verb.clone(),
            args,
            surface,
        }
    }

    /// Parses surface text against `templates`, canonicalizing slot captures
    /// into entity ids. The first matching template wins.
    pub fn parse(text: &str, templates: &[CommandTemplate]) -> Option<Self> {
        let words = command_words(text);
        templates.iter().find_map(|t| {
            let captures = t.match_words(&words)?;
            let args = captures
                .iter()
                .map(|span| canonicalize(&span.join(" ")).ok())
                .collect::<Option<Vec<_>>>()?;
            Some(ActionCommand::new(t, args))
        })
    }
}

impl fmt::Display for ActionCommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.surface)
    }
}
