use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use super::{content_lines, read, tsv_fields, CommonsenseError};
use crate::extract::{canonicalize, EntityId, RelationLabel, Source, Triple};
use crate::graph::KnowledgeGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FactRelation {
    /// `entity` holds `value`.
    Contains,
    /// `entity` is kept in `value`.
    Location,
    /// `value` is a property of `entity`.
    Attribute,
}

impl FactRelation {
    pub fn as_str(self) -> &'static str {
        match self {
            FactRelation::Contains => "contains",
            FactRelation::Location => "location",
            FactRelation::Attribute => "attribute",
        }
    }
}

impl FromStr for FactRelation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "contains" => Ok(FactRelation::Contains),
            "location" => Ok(FactRelation::Location),
            "attribute" => Ok(FactRelation::Attribute),
            other => Err(format!("unknown fact relation {other:?}")),
        }
    }
}

/// Answers available to the question-answering provider.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FactBase {
    facts: BTreeSet<(EntityId, FactRelation, EntityId)>,
}

impl FactBase {
    pub fn load(path: &Path) -> Result<Self, CommonsenseError> {
        Self::parse(&read(path)?)
    }

    /// Parses `entity<TAB>relation<TAB>value` lines.
    pub fn parse(text: &str) -> Result<Self, CommonsenseError> {
        let mut facts = BTreeSet::new();
        for (lineno, line) in content_lines(text) {
            let f = tsv_fields(line, lineno, 3)?;
            let syntax = |message: String| CommonsenseError::Syntax { line: lineno, message };
            let entity = canonicalize(f[0]).map_err(|e| syntax(e.to_string()))?;
            let relation: FactRelation = f[1].parse().map_err(syntax)?;
            let value = canonicalize(f[2]).map_err(|e| syntax(e.to_string()))?;
            facts.insert((entity, relation, value));
        }
        Ok(FactBase { facts })
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn facts(&self) -> impl Iterator<Item = &(EntityId, FactRelation, EntityId)> {
        self.facts.iter()
    }

    pub fn entities(&self) -> BTreeSet<EntityId> {
        self.facts
            .iter()
            .flat_map(|(e, _, v)| [e.clone(), v.clone()])
            .collect()
    }

    fn answer(&self, kind: QuestionKind, x: &EntityId) -> Vec<Triple> {
        let qa = |s: &EntityId, r, o: &EntityId| Triple::new(s.clone(), r, o.clone(), Source::InferredQA);
        let mut out = Vec::new();
        for (e, rel, v) in &self.facts {
            match (kind, rel) {
                (QuestionKind::WhatIsIn, FactRelation::Contains) if e == x => {
                    out.push(qa(v, RelationLabel::In, x))
                }
                (QuestionKind::WhatIsIn, FactRelation::Location) if v == x => {
                    out.push(qa(e, RelationLabel::In, x))
                }
                (QuestionKind::WhereIs, FactRelation::Location) if e == x => {
                    out.push(qa(x, RelationLabel::In, v))
                }
                (QuestionKind::WhereIs, FactRelation::Contains) if v == x => {
                    out.push(qa(x, RelationLabel::In, e))
                }
                (QuestionKind::Attributes, FactRelation::Attribute) if e == x => {
                    out.push(qa(v, RelationLabel::AttributeOf, x))
                }
                _ => {}
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuestionKind {
    /// Answers become `<answer, In, X>`.
    WhatIsIn,
    /// Answers become `<X, In, answer>`.
    WhereIs,
    /// Answers become `<answer, AttributeOf, X>`.
    Attributes,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Question {
    pub kind: QuestionKind,
    /// Question text with `X` standing for the entity asked about.
    pub template: String,
}

impl Question {
    pub fn render(&self, x: &EntityId) -> String {
        self.template.replace('X', &x.display())
    }
}

impl fmt::Display for Question {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.template)
    }
}

/// Ordered question templates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuestionSet {
    questions: Vec<Question>,
}

impl QuestionSet {
    pub fn new(questions: Vec<Question>) -> Self {
        QuestionSet { questions }
    }

    pub fn questions(&self) -> &[Question] {
        &self.questions
    }
}

impl Default for QuestionSet {
    fn default() -> Self {
        let q = |kind, template: &str| Question {
            kind,
            template: template.to_string(),
        };
        QuestionSet::new(vec![
            q(QuestionKind::WhatIsIn, "What is in X?"),
            q(QuestionKind::WhereIs, "Where is X?"),
            q(QuestionKind::Attributes, "What attributes does X possess?"),
        ])
    }
}

/// Asks every question about `location` and every entity of `kg`, then about
/// each entity the answers introduce, until nothing new turns up.
///
/// The result is deduplicated and keeps discovery order.
pub fn qa_infer(
    facts: &FactBase,
    questions: &QuestionSet,
    location: &EntityId,
    kg: &KnowledgeGraph,
) -> Vec<Triple> {
    let mut queue: VecDeque<EntityId> = VecDeque::new();
    let mut asked: HashSet<EntityId> = HashSet::new();
    for e in std::iter::once(location).chain(kg.entities()) {
        if asked.insert(e.clone()) {
            queue.push_back(e.clone());
        }
    }
    let mut out: Vec<Triple> = Vec::new();
    let mut seen: HashSet<Triple> = HashSet::new();
    while let Some(x) = queue.pop_front() {
        for q in questions.questions() {
            for t in facts.answer(q.kind, &x) {
                for e in [&t.subject, &t.object] {
                    if asked.insert(e.clone()) {
                        queue.push_back(e.clone());
                    }
                }
                if seen.insert(t.clone()) {
                    out.push(t);
                }
            }
        }
    }
    out
}
