use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use super::{read, CommonsenseError};
use crate::command::{command_words, ActionCommand};

/// Padding token before the first command of a sequence.
pub const BEGIN: &str = "<s>";
/// Token closing every sequence.
pub const END: &str = "</s>";

/// Additive-smoothed n-gram model over whole commands.
///
/// `P(w | h) = (c(h, w) + alpha) / (c(h) + alpha * |V|)` where `h` is the
/// previous `n - 1` commands, padded with [`BEGIN`], and `V` is every command
/// seen in training plus [`END`].
#[derive(Debug, Clone)]
pub struct SequenceModel {
    order: usize,
    alpha: f64,
    counts: HashMap<Vec<String>, HashMap<String, u32>>,
    totals: HashMap<Vec<String>, u32>,
    vocab: BTreeSet<String>,
}

/// Canonical token for a command line: lowercase, articles dropped.
pub(crate) fn normalize_command(text: &str) -> String {
    command_words(text).join(" ")
}

impl SequenceModel {
    pub fn fit(corpus: &[Vec<String>], order: usize, alpha: f64) -> Result<Self, CommonsenseError> {
        if order == 0 {
            return Err(CommonsenseError::BadOrder);
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(CommonsenseError::BadAlpha(alpha));
        }
        let sequences: Vec<Vec<String>> = corpus
            .iter()
            .map(|seq| {
                seq.iter()
                    .map(|c| normalize_command(c))
                    .filter(|c| !c.is_empty())
                    .collect::<Vec<_>>()
            })
            .filter(|seq| !seq.is_empty())
            .collect();
        if sequences.is_empty() {
            return Err(CommonsenseError::EmptyCorpus);
        }

        let mut model = SequenceModel {
            order,
            alpha,
            counts: HashMap::new(),
            totals: HashMap::new(),
            vocab: BTreeSet::new(),
        };
        model.vocab.insert(END.to_string());
        for seq in sequences {
            let mut padded = vec![BEGIN.to_string(); order - 1];
            padded.extend(seq.iter().cloned());
            padded.push(END.to_string());
            model.vocab.extend(seq);
            for i in order - 1..padded.len() {
                let history = padded[i + 1 - order..i].to_vec();
                *model
                    .counts
                    .entry(history.clone())
                    .or_default()
                    .entry(padded[i].clone())
                    .or_default() += 1;
                *model.totals.entry(history).or_default() += 1;
            }
        }
        Ok(model)
    }

    /// Reads a corpus file (one command per line, blank lines between
    /// sequences) and fits it.
    pub fn load(path: &Path, order: usize, alpha: f64) -> Result<Self, CommonsenseError> {
        Self::fit(&parse_corpus(&read(path)?), order, alpha)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn vocab(&self) -> &BTreeSet<String> {
        &self.vocab
    }

    /// Raw count of `next` following `history` (both normalized tokens).
    pub fn count(&self, history: &[&str], next: &str) -> u32 {
        let h = self.history_key(history);
        self.counts
            .get(&h)
            .and_then(|m| m.get(next))
            .copied()
            .unwrap_or(0)
    }

    fn history_key(&self, history: &[&str]) -> Vec<String> {
        let want = self.order - 1;
        let mut key: Vec<String> = Vec::with_capacity(want);
        let have = history.len().min(want);
        key.extend(std::iter::repeat_n(BEGIN.to_string(), want - have));
        key.extend(history[history.len() - have..].iter().map(|s| s.to_string()));
        key
    }

    /// Smoothed `log P(next | history)`. Finite for any input.
    pub fn log_prob(&self, history: &[&str], next: &str) -> f64 {
        let h = self.history_key(history);
        let c_hw = self
            .counts
            .get(&h)
            .and_then(|m| m.get(next))
            .copied()
            .unwrap_or(0) as f64;
        let c_h = self.totals.get(&h).copied().unwrap_or(0) as f64;
        ((c_hw + self.alpha) / (c_h + self.alpha * self.vocab.len() as f64)).ln()
    }

    /// `log P(candidate | last n-1 commands of history)`.
    pub fn score_sequence(&self, history: &[ActionCommand], candidate: &ActionCommand) -> f64 {
        let start = history.len().saturating_sub(self.order - 1);
        let h: Vec<&str> = history[start..].iter().map(|c| c.surface.as_str()).collect();
        self.log_prob(&h, &candidate.surface)
    }
}

/// Splits corpus text into sequences of normalized commands.
pub fn parse_corpus(text: &str) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            if !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
        } else {
            current.push(normalize_command(line));
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn seqs(s: &[&[&str]]) -> Vec<Vec<String>> {
        s.iter().map(|q| q.iter().map(|c| c.to_string()).collect()).collect()
    }

    #[test]
    fn single_sequence_counts() {
        let m = SequenceModel::fit(&seqs(&[&["get", "up"]]), 2, 0.1).unwrap();
        assert_eq!(m.count(&["get"], "up"), 1);
        assert_eq!(m.count(&[], "get"), 1);
        assert_eq!(m.count(&["up"], END), 1);
        assert_eq!(m.vocab().len(), 3);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(SequenceModel::fit(&[], 2, 0.1), Err(CommonsenseError::EmptyCorpus)));
        assert!(matches!(SequenceModel::fit(&seqs(&[&["a"]]), 0, 0.1), Err(CommonsenseError::BadOrder)));
        assert!(matches!(SequenceModel::fit(&seqs(&[&["a"]]), 2, 0.0), Err(CommonsenseError::BadAlpha(_))));
    }

    #[test]
    fn unseen_history_is_uniform() {
        let m = SequenceModel::fit(&seqs(&[&["look", "wait"]]), 2, 0.1).unwrap();
        let v = m.vocab().len() as f64;
        assert_relative_eq!(m.log_prob(&["jump"], "dance"), -v.ln(), epsilon = 1e-12);
    }

    /// Vocabulary of 19 commands plus the end marker; "open door" is followed
    /// by "go north" in all three of its occurrences.
    #[test]
    fn hand_computed_bigram() {
        let mut corpus = vec![vec!["open door".to_string(), "go north".to_string()]; 3];
        corpus.push((0..17).map(|i| format!("filler {i}")).collect());
        let m = SequenceModel::fit(&corpus, 2, 0.1).unwrap();
        assert_eq!(m.vocab().len(), 20);
        assert_relative_eq!(m.log_prob(&["open door"], "go north"), (3.1f64 / 5.0).ln(), epsilon = 1e-12);
    }

    #[test]
    fn corpus_parsing() {
        let c = parse_corpus("get up\nGo   South\n\n\n# note\nlook\n");
        assert_eq!(c, seqs(&[&["get up", "go south"], &["look"]]));
    }

    proptest! {
        #[test]
        fn conditionals_normalize(
            corpus in prop::collection::vec(prop::collection::vec(prop::sample::select(vec!["look", "wait", "jump", "sing"]), 1..6), 1..5),
            history in prop::collection::vec(prop::sample::select(vec!["look", "wait", "jump", "dance"]), 0..4),
            order in 1usize..4,
            alpha in 0.01f64..2.0,
        ) {
            let corpus: Vec<Vec<String>> = corpus.into_iter().map(|s| s.into_iter().map(String::from).collect()).collect();
            let m = SequenceModel::fit(&corpus, order, alpha).unwrap();
            let total: f64 = m.vocab().iter().map(|w| m.log_prob(&history, w).exp()).sum();
            prop_assert!((total - 1.0).abs() < 1e-9, "total {}", total);
        }
    }
}
