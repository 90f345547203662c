//! The agent's belief state: a monotone set of triples, plus the command
//! filter and feature encoder built on top of it.

use std::collections::{BTreeMap, BTreeSet};

use crate::command::ActionCommand;
use crate::extract::{EntityId, RelationLabel, Source, Triple};

/// Default width of the hashed observation block.
pub const DEFAULT_HASH_WIDTH: usize = 64;

/// A growing set of belief triples. Entities are exactly the subjects and
/// objects of the stored triples.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnowledgeGraph {
    triples: BTreeMap<Triple, Source>,
    entities: BTreeSet<EntityId>,
}

impl KnowledgeGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `new` to the graph. Duplicates collapse on (subject, relation,
    /// object); when sources differ the observed copy wins.
    pub fn update(mut self, new: impl IntoIterator<Item = Triple>) -> Self {
        for t in new {
            self.entities.insert(t.subject.clone());
            self.entities.insert(t.object.clone());
            let source = t.source;
            self.triples
                .entry(t)
                .and_modify(|s| *s = (*s).min(source))
                .or_insert(source);
        }
        self
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn triples(&self) -> impl Iterator<Item = Triple> + '_ {
        self.triples.iter().map(|(t, s)| Triple {
            source: *s,
            ..t.clone()
        })
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.triples.contains_key(t)
    }

    pub fn source_of(&self, t: &Triple) -> Option<Source> {
        self.triples.get(t).copied()
    }

    pub fn entities(&self) -> &BTreeSet<EntityId> {
        &self.entities
    }

    pub fn contains_entity(&self, e: &EntityId) -> bool {
        self.entities.contains(e)
    }

    /// Subjects `s` with `<s, relation, object>` in the graph.
    pub fn subjects_with(&self, relation: RelationLabel, object: &EntityId) -> Vec<&EntityId> {
        self.triples
            .keys()
            .filter(|t| t.relation == relation && &t.object == object)
            .map(|t| &t.subject)
            .collect()
    }

    /// Objects `o` with `<subject, relation, o>` in the graph.
    pub fn objects_of(&self, subject: &EntityId, relation: RelationLabel) -> Vec<&EntityId> {
        self.triples
            .keys()
            .filter(|t| t.relation == relation && &t.subject == subject)
            .map(|t| &t.object)
            .collect()
    }

    /// Keeps the candidates whose every argument is a known entity.
    /// Zero-argument commands always pass; input order is preserved.
    pub fn filter_commands(&self, candidates: &[ActionCommand]) -> Vec<ActionCommand> {
        candidates
            .iter()
            .filter(|c| c.args.iter().all(|a| self.contains_entity(a)))
            .cloned()
            .collect()
    }

    /// Bag-of-entities block followed by a hashed bag-of-words block of the
    /// last observation. All entries are 0 or 1.
    pub fn encode(&self, last_observation: &str, vocab: &Vocabulary) -> FeatureVector {
        self.encode_with_bins(&observation_bins(last_observation, vocab.hash_width()), vocab)
    }

    /// [`KnowledgeGraph::encode`] with the observation already hashed by
    /// [`observation_bins`].
    pub fn encode_with_bins(&self, bins: &[usize], vocab: &Vocabulary) -> FeatureVector {
        let mut fv = FeatureVector::zeros(vocab.len(), vocab.hash_width());
        for e in &self.entities {
            if let Some(i) = vocab.index(e) {
                fv.values[i] = 1.0;
            }
        }
        for &b in bins {
            fv.values[vocab.len() + b] = 1.0;
        }
        fv
    }

    /// Sorted `subject<TAB>relation<TAB>object<TAB>source` lines.
    pub fn dump(&self) -> String {
        let mut lines: Vec<String> = self.triples().map(|t| t.to_string()).collect();
        lines.sort();
        let mut out = lines.join("\n");
        if !out.is_empty() {
            out.push('\n');
        }
        out
    }
}

/// Distinct hash bins hit by the words of `text`, sorted.
pub fn observation_bins(text: &str, width: usize) -> Vec<usize> {
    if width == 0 {
        return Vec::new();
    }
    let mut bins: Vec<usize> = observation_tokens(text)
        .map(|t| (fnv1a(t.as_bytes()) % width as u64) as usize)
        .collect();
    bins.sort_unstable();
    bins.dedup();
    bins
}

fn observation_tokens(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !(c.is_alphanumeric() || c == '\''))
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0100_0000_01b3);
    }
    hash
}

/// Dense, stable entity indexing for one experiment run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    ids: Vec<EntityId>,
    index: BTreeMap<EntityId, usize>,
    hash_width: usize,
}

impl Vocabulary {
    /// Sorts and deduplicates `ids`.
    pub fn new(ids: impl IntoIterator<Item = EntityId>, hash_width: usize) -> Self {
        let set: BTreeSet<EntityId> = ids.into_iter().collect();
        let ids: Vec<EntityId> = set.into_iter().collect();
        let index = ids.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        Vocabulary {
            ids,
            index,
            hash_width,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn hash_width(&self) -> usize {
        self.hash_width
    }

    /// Length of every [`FeatureVector`] built from this vocabulary.
    pub fn feature_dim(&self) -> usize {
        self.ids.len() + self.hash_width
    }

    pub fn index(&self, e: &EntityId) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn contains(&self, e: &EntityId) -> bool {
        self.index.contains_key(e)
    }

    pub fn ids(&self) -> &[EntityId] {
        &self.ids
    }
}

/// State features: entity block of length |V| then the observation block.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
    entity_len: usize,
}

impl FeatureVector {
    pub fn zeros(entity_len: usize, hash_width: usize) -> Self {
        FeatureVector {
            values: vec![0.0; entity_len + hash_width],
            entity_len,
        }
    }

    pub fn from_values(values: Vec<f64>, entity_len: usize) -> Self {
        assert!(entity_len <= values.len());
        FeatureVector { values, entity_len }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn entity_block(&self) -> &[f64] {
        &self.values[..self.entity_len]
    }

    pub fn observation_block(&self) -> &[f64] {
        &self.values[self.entity_len..]
    }

    /// `(index, value)` for every nonzero entry.
    pub fn nonzero(&self) -> Vec<(usize, f64)> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (i, *v))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::command::CommandTemplate;
    use proptest::prelude::*;

    fn t(s: &str, r: RelationLabel, o: &str) -> Triple {
        Triple::observed(s, r, o)
    }

    fn vocab() -> Vocabulary {
        Vocabulary::new(
            ["sink", "toilet", "shower", "bathroom", "bedroom", "watch"]
                .into_iter()
                .map(EntityId::new),
            DEFAULT_HASH_WIDTH,
        )
    }

    #[test]
    fn update_singleton_and_identity() {
        let g = KnowledgeGraph::new().update([t("sink", RelationLabel::In, "bathroom")]);
        assert_eq!(g.len(), 1);
        let ents: Vec<&str> = g.entities().iter().map(EntityId::as_str).collect();
        assert_eq!(ents, vec!["bathroom", "sink"]);
        let same = g.clone().update([]);
        assert_eq!(same, g);
    }

    #[test]
    fn observed_wins_over_inferred() {
        let mut inferred = t("sink", RelationLabel::In, "bathroom");
        inferred.source = Source::InferredHasA;
        let g = KnowledgeGraph::new().update([inferred.clone()]);
        let g = g.update([t("sink", RelationLabel::In, "bathroom")]);
        assert_eq!(g.len(), 1);
        assert_eq!(g.source_of(&inferred), Some(Source::Observed));
        // And an inferred duplicate never downgrades an observed triple.
        let g = g.update([inferred.clone()]);
        assert_eq!(g.source_of(&inferred), Some(Source::Observed));
    }

    #[test]
    fn contains_entity_examples() {
        let sink = EntityId::new("sink");
        assert!(!KnowledgeGraph::new().contains_entity(&sink));
        let g = KnowledgeGraph::new().update([t("sink", RelationLabel::In, "bathroom")]);
        assert!(g.contains_entity(&sink));
        assert!(!g.contains_entity(&EntityId::new("bathtub")));
    }

    #[test]
    fn filter_keeps_order_and_zero_arity() {
        let go = CommandTemplate::new("go_south", "go south");
        let wash = CommandTemplate::new("wash", "wash hands in _");
        let cands = vec![
            ActionCommand::new(&wash, vec![EntityId::new("sink")]),
            ActionCommand::new(&go, vec![]),
            ActionCommand::new(&wash, vec![EntityId::new("mirror")]),
        ];
        let g = KnowledgeGraph::new().update([t("mirror", RelationLabel::In, "bathroom")]);
        let kept: Vec<String> = g
            .filter_commands(&cands)
            .into_iter()
            .map(|c| c.surface)
            .collect();
        assert_eq!(kept, vec!["go south", "wash hands in mirror"]);
        assert!(g.filter_commands(&[]).is_empty());
    }

    #[test]
    fn encode_examples() {
        let v = vocab();
        let zero = KnowledgeGraph::new().encode("", &v);
        assert_eq!(zero.len(), v.feature_dim());
        assert!(zero.values().iter().all(|x| *x == 0.0));

        let g = KnowledgeGraph::new().update([Triple::new(
            EntityId::new("sink"),
            RelationLabel::AttributeOf,
            EntityId::new("sink"),
            Source::Observed,
        )]);
        let fv = g.encode("", &v);
        let ones: Vec<usize> = fv
            .entity_block()
            .iter()
            .enumerate()
            .filter(|(_, x)| **x == 1.0)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(ones, vec![v.index(&EntityId::new("sink")).unwrap()]);
    }

    #[test]
    fn observation_block_is_clipped() {
        let v = vocab();
        let fv = KnowledgeGraph::new().encode("sink sink sink sink", &v);
        assert_eq!(fv.observation_block().iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn dump_is_sorted_tsv() {
        let g = KnowledgeGraph::new().update([
            t("toilet", RelationLabel::In, "bathroom"),
            t("bedroom", RelationLabel::ExitTo, "bathroom"),
        ]);
        assert_eq!(
            g.dump(),
            "bedroom\tExitTo\tbathroom\tObserved\ntoilet\tIn\tbathroom\tObserved\n"
        );
    }

    fn arb_triple() -> impl Strategy<Value = Triple> {
        let names = prop::sample::select(vec!["sink", "toilet", "shower", "bathroom", "watch"]);
        (
            names.clone(),
            prop::sample::select(RelationLabel::ALL.to_vec()),
            names,
            prop::sample::select(vec![Source::Observed, Source::InferredHasA, Source::InferredQA]),
        )
            .prop_map(|(s, r, o, src)| Triple::new(EntityId::new(s), r, EntityId::new(o), src))
    }

    proptest! {
        #[test]
        fn updates_are_monotone(batches in prop::collection::vec(prop::collection::vec(arb_triple(), 0..6), 0..8)) {
            let mut g = KnowledgeGraph::new();
            let mut seen: Vec<Triple> = Vec::new();
            for batch in batches {
                let before = g.len();
                g = g.update(batch.clone());
                prop_assert!(g.len() >= before);
                seen.extend(batch);
                for t in &seen {
                    prop_assert!(g.contains(t));
                }
                let derived: BTreeSet<EntityId> = g
                    .triples()
                    .flat_map(|t| [t.subject, t.object])
                    .collect();
                prop_assert_eq!(&derived, g.entities());
            }
        }

        #[test]
        fn encode_is_a_set_function(mut ts in prop::collection::vec(arb_triple(), 0..10)) {
            let v = vocab();
            let a = KnowledgeGraph::new().update(ts.clone());
            ts.reverse();
            let b = KnowledgeGraph::new().update(ts);
            prop_assert_eq!(a.encode("look", &v), b.encode("look", &v));
        }

        /// Brute-force oracle: a candidate passes iff all its arguments are
        /// subjects or objects of some stored triple.
        #[test]
        fn filter_matches_brute_force(
            ts in prop::collection::vec(arb_triple(), 0..8),
            picks in prop::collection::vec(prop::collection::vec(prop::sample::select(vec!["sink", "toilet", "shower", "bathroom", "watch", "towel"]), 0..3), 0..10),
        ) {
            let g = KnowledgeGraph::new().update(ts.clone());
            let cands: Vec<ActionCommand> = picks.iter().map(|args| {
                let template = CommandTemplate::new("v", &vec!["x"].into_iter().chain(args.iter().map(|_| "_")).collect::<Vec<_>>().join(" "));
                ActionCommand::new(&template, args.iter().map(|a| EntityId::new(*a)).collect())
            }).collect();
            let kept = g.filter_commands(&cands);
            let expected: Vec<ActionCommand> = cands.iter().filter(|c| {
                c.args.iter().all(|a| ts.iter().any(|t| &t.subject == a || &t.object == a))
            }).cloned().collect();
            prop_assert_eq!(kept, expected);
        }
    }
}
