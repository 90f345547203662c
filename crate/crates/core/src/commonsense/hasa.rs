use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use super::{content_lines, read, tsv_fields, CommonsenseError};
use crate::extract::{canonicalize, EntityId, RelationLabel, Source, Triple};

/// Objects commonly found in each kind of location.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HasAKnowledgeBase {
    map: BTreeMap<EntityId, BTreeSet<EntityId>>,
}

impl HasAKnowledgeBase {
    pub fn load(path: &Path) -> Result<Self, CommonsenseError> {
        Self::parse(&read(path)?)
    }

    /// Parses `location<TAB>object` lines. Blank lines and `#` comments are
    /// skipped.
    pub fn parse(text: &str) -> Result<Self, CommonsenseError> {
        let mut map: BTreeMap<EntityId, BTreeSet<EntityId>> = BTreeMap::new();
        for (lineno, line) in content_lines(text) {
            let f = tsv_fields(line, lineno, 2)?;
            let canon = |s: &str| {
                canonicalize(s).map_err(|e| CommonsenseError::Syntax {
                    line: lineno,
                    message: e.to_string(),
                })
            };
            map.entry(canon(f[0])?).or_default().insert(canon(f[1])?);
        }
        Ok(HasAKnowledgeBase { map })
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn objects(&self, location: &EntityId) -> Option<&BTreeSet<EntityId>> {
        self.map.get(location)
    }

    /// Every location and object mentioned.
    pub fn entities(&self) -> BTreeSet<EntityId> {
        self.map
            .iter()
            .flat_map(|(l, os)| std::iter::once(l).chain(os))
            .cloned()
            .collect()
    }
}

/// `<location, HasA, o>` and `<o, In, location>` for each object the KB lists
/// under `location`.
pub fn infer_hasa(kb: &HasAKnowledgeBase, location: &EntityId) -> Vec<Triple> {
    let Some(objects) = kb.objects(location) else {
        return Vec::new();
    };
    objects
        .iter()
        .flat_map(|o| {
            [
                Triple::new(location.clone(), RelationLabel::HasA, o.clone(), Source::InferredHasA),
                Triple::new(o.clone(), RelationLabel::In, location.clone(), Source::InferredHasA),
            ]
        })
        .collect()
}
