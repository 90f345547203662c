//! Shared fixtures for the pipeline benchmarks.

use slicelife_core::agent::Providers;
use slicelife_core::{shipped_data_dir, ExtractionRules, GameSpec, ShapingConfig};

/// Shipped game, extraction rules and commonsense providers.
pub struct Fixture {
    pub spec: GameSpec,
    pub rules: ExtractionRules,
    pub providers: Providers,
}

impl Fixture {
    pub fn load() -> Self {
        let data = shipped_data_dir();
        Fixture {
            spec: GameSpec::load(&data.join("nine05.spec")).expect("shipped spec"),
            rules: ExtractionRules::load(&data.join("extract.rules")).expect("shipped rules"),
            providers: Providers::load(
                &data.join("hasa.tsv"),
                &data.join("facts.tsv"),
                &data.join("corpus.txt"),
                ShapingConfig::default(),
            )
            .expect("shipped providers"),
        }
    }
}

/// The opening bedroom paragraph, as the game prints it after "get up".
pub const BEDROOM: &str = include_str!("../../core/tests/fixtures/bedroom.txt");
