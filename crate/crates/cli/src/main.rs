use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use slicelife_core::agent::Providers;
use slicelife_core::harness::{self, ExperimentConfig, OUT_DIR_ENV};
use slicelife_core::world::run_walkthrough;
use slicelife_core::{shipped_data_dir, ExtractionRules, GameMode, GameSpec, ShapingConfig};

#[derive(Parser)]
#[command(name = "slicelife", version, about = "Knowledge-graph agents on a slice-of-life text adventure")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train every (variant, seed) cell of an experiment and write metrics.csv.
    #[command(after_help = format!("The output directory can be overridden with {OUT_DIR_ENV}."))]
    Train {
        #[arg(long)]
        config: PathBuf,
    },
    /// Smooth a metrics file into per-variant mean and max curves (CSV on stdout).
    Aggregate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 100)]
        window: usize,
        /// Write the summary here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Play the game interactively. `debug kg` shows the belief graph, `quit` exits.
    Play {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        ablated: bool,
        /// Extraction rules; defaults to the shipped file.
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Add HasA and QA triples to `debug kg` output.
        #[arg(long)]
        commonsense: bool,
    },
    /// Replay the spec's walkthrough in both modes and report reward and steps.
    Walkthrough {
        #[arg(long)]
        spec: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Train { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            eprintln!(
                "training {}: {} variants x {} seeds x {} episodes",
                cfg.name,
                cfg.variants.len(),
                cfg.seeds.len(),
                cfg.training.episodes
            );
            let path = harness::run_experiment(&cfg)?;
            println!("{}", path.display());
        }
        Command::Aggregate { input, window, out } => {
            let text = std::fs::read_to_string(&input).with_context(|| format!("reading {}", input.display()))?;
            let rows = harness::parse_metrics(&text)?;
            let summary = harness::write_summary(&harness::aggregate(&rows, window)?);
            match out {
                Some(path) => std::fs::write(&path, summary).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{summary}"),
            }
        }
        Command::Play {
            spec,
            ablated,
            rules,
            commonsense,
        } => {
            let spec = GameSpec::load(&spec)?;
            let data = shipped_data_dir();
            let rules = ExtractionRules::load(&rules.unwrap_or_else(|| data.join("extract.rules")))?;
            let providers = if commonsense {
                Some(Providers::load(
                    &data.join("hasa.tsv"),
                    &data.join("facts.tsv"),
                    &data.join("corpus.txt"),
                    ShapingConfig::default(),
                )?)
            } else {
                None
            };
            let mode = if ablated { GameMode::Ablated } else { GameMode::Full };
            let stdin = io::stdin();
            harness::repl(&spec, mode, &rules, providers.as_ref(), stdin.lock(), io::stdout())?;
        }
        Command::Walkthrough { spec } => {
            let spec = GameSpec::load(&spec)?;
            let mut ok = true;
            for mode in [GameMode::Full, GameMode::Ablated] {
                let (reward, steps) = run_walkthrough(&spec, mode)?;
                println!("{mode}: reward {reward} in {steps} steps");
                ok &= reward == slicelife_core::world::MAX_EPISODE_REWARD;
            }
            if !ok {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
