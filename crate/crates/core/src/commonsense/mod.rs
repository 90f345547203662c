//! Commonsense providers: location-to-object HasA inference, templated
//! question answering over a fact base, and an n-gram command-sequence model
//! used to re-rank the policy's candidates.

mod hasa;
mod qa;
mod rerank;
mod sequence;

pub use hasa::{infer_hasa, HasAKnowledgeBase};
pub use qa::{qa_infer, FactBase, FactRelation, Question, QuestionKind, QuestionSet};
pub use rerank::{rerank, ShapingConfig};
pub(crate) use rerank::top_k;
pub use sequence::{SequenceModel, BEGIN, END};

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CommonsenseError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("corpus contains no command sequences")]
    EmptyCorpus,
    #[error("n-gram order must be at least 1")]
    BadOrder,
    #[error("smoothing constant must be positive and finite, got {0}")]
    BadAlpha(f64),
    #[error("invalid shaping config: {0}")]
    BadShaping(String),
}

pub(crate) fn read(path: &std::path::Path) -> Result<String, CommonsenseError> {
    std::fs::read_to_string(path).map_err(|source| CommonsenseError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Splits a TSV line into exactly `n` non-empty fields.
pub(crate) fn tsv_fields(line: &str, lineno: usize, n: usize) -> Result<Vec<&str>, CommonsenseError> {
    let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
    if fields.len() != n || fields.iter().any(|f| f.is_empty()) {
        return Err(CommonsenseError::Syntax {
            line: lineno,
            message: format!("expected {n} tab-separated fields, got {line:?}"),
        });
    }
    Ok(fields)
}

/// Non-blank, non-comment lines with 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
}
