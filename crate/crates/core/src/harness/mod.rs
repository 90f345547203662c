//! Experiment orchestration, metrics, aggregation and the play REPL.

mod config;
mod metrics;
mod repl;
mod run;

pub use config::{DistractorLimit, ExperimentConfig, OUT_DIR_ENV};
pub use metrics::{
    aggregate, moving_average, parse_metrics, write_metrics, write_summary, MetricsRow, SummaryRow,
    METRICS_HEADER, SUMMARY_HEADER,
};
pub use repl::repl;
pub use run::{run_experiment, CellResult, Experiment};

use std::path::PathBuf;

use crate::agent::{AgentError, AgentVariant};
use crate::commonsense::CommonsenseError;
use crate::extract::RulesError;
use crate::world::SpecError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Rules(#[from] RulesError),
    #[error(transparent)]
    Commonsense(#[from] CommonsenseError),
    #[error("metrics line {line}: {message}")]
    Metrics { line: usize, message: String },
    #[error("mixed configs in one metrics file: {0}")]
    MixedConfigs(String),
    #[error("{variant} seed {seed} episode {episode}: {source}")]
    Cell {
        variant: AgentVariant,
        seed: u64,
        episode: u32,
        source: AgentError,
    },
}
