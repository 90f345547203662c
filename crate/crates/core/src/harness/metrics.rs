use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::HarnessError;
use crate::agent::AgentVariant;
use crate::world::CHECKPOINT_COUNT;

pub const METRICS_HEADER: &str = "variant,seed,episode,reward,steps,cp1,cp2,cp3,cp4,cp5,cp6";
pub const SUMMARY_HEADER: &str = "variant,episode,mean,max";

/// One training episode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricsRow {
    pub variant: AgentVariant,
    pub seed: u64,
    pub episode: u32,
    pub reward: u32,
    pub steps: u32,
    pub checkpoints: [Option<u32>; CHECKPOINT_COUNT as usize],
}

impl MetricsRow {
    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "{},{},{},{},{}",
            self.variant, self.seed, self.episode, self.reward, self.steps
        );
        for cp in &self.checkpoints {
            s.push(',');
            if let Some(step) = cp {
                write!(s, "{step}").unwrap();
            }
        }
        s
    }

    fn parse(line: &str, lineno: usize) -> Result<Self, HarnessError> {
        let bad = |m: &str| HarnessError::Metrics {
            line: lineno,
            message: m.to_string(),
        };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 + CHECKPOINT_COUNT as usize {
            return Err(bad("wrong number of fields"));
        }
        let num = |s: &str| s.parse::<u32>().map_err(|_| bad(&format!("bad number {s:?}")));
        let mut checkpoints = [None; CHECKPOINT_COUNT as usize];
        for (slot, field) in checkpoints.iter_mut().zip(&f[5..]) {
            if !field.is_empty() {
                *slot = Some(num(field)?);
            }
        }
        Ok(MetricsRow {
            variant: f[0].parse().map_err(|e: String| bad(&e))?,
            seed: f[1].parse().map_err(|_| bad("bad seed"))?,
            episode: num(f[2])?,
            reward: num(f[3])?,
            steps: num(f[4])?,
            checkpoints,
        })
    }
}

pub fn write_metrics(rows: &[MetricsRow]) -> String {
    let mut out = String::with_capacity(32 * (rows.len() + 1));
    out.push_str(METRICS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}

pub fn parse_metrics(text: &str) -> Result<Vec<MetricsRow>, HarnessError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == METRICS_HEADER => {}
        _ => {
            return Err(HarnessError::Metrics {
                line: 1,
                message: format!("expected header {METRICS_HEADER:?}"),
            })
        }
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| MetricsRow::parse(l.trim(), i + 1))
        .collect()
}

/// One line of the aggregate table.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub variant: AgentVariant,
    pub episode: u32,
    /// Mean over seeds of each seed's trailing moving average.
    pub mean: f64,
    /// Largest of those per-seed moving averages.
    pub max: f64,
}

/// Per-seed trailing moving average of reward over `window` episodes, then
/// the mean and maximum across seeds at each episode.
///
/// Every seed of a variant must cover the same episodes exactly once;
/// anything else means rows from different configs were mixed.
pub fn aggregate(rows: &[MetricsRow], window: usize) -> Result<Vec<SummaryRow>, HarnessError> {
    if window == 0 {
        return Err(HarnessError::Config("window must be at least 1".into()));
    }
    let mut series: BTreeMap<AgentVariant, BTreeMap<u64, BTreeMap<u32, u32>>> = BTreeMap::new();
    for r in rows {
        let per_seed = series.entry(r.variant).or_default().entry(r.seed).or_default();
        if per_seed.insert(r.episode, r.reward).is_some() {
            return Err(HarnessError::MixedConfigs(format!(
                "{} seed {} episode {} appears more than once",
                r.variant, r.seed, r.episode
            )));
        }
    }

    let mut out = Vec::new();
    for (variant, seeds) in &series {
        let mut iter = seeds.iter();
        let (_, first) = iter.next().expect("variant has at least one seed");
        let episodes: Vec<u32> = first.keys().copied().collect();
        for (seed, s) in iter {
            if !s.keys().copied().eq(episodes.iter().copied()) {
                return Err(HarnessError::MixedConfigs(format!(
                    "{variant} seed {seed} covers different episodes from its other seeds"
                )));
            }
        }
        let smoothed: Vec<Vec<f64>> = seeds
            .values()
            .map(|s| moving_average(&s.values().map(|&r| f64::from(r)).collect::<Vec<_>>(), window))
            .collect();
        for (i, &episode) in episodes.iter().enumerate() {
            let at: Vec<f64> = smoothed.iter().map(|s| s[i]).collect();
            out.push(SummaryRow {
                variant: *variant,
                episode,
                mean: at.iter().sum::<f64>() / at.len() as f64,
                max: at.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            });
        }
    }
    Ok(out)
}

/// Trailing mean over at most `window` values ending at each index.
pub fn moving_average(xs: &[f64], window: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len());
    let mut sum = 0.0;
    for i in 0..xs.len() {
        sum += xs[i];
        if i >= window {
            sum -= xs[i - window];
        }
        let n = (i + 1).min(window);
        out.push(sum / n as f64);
    }
    out
}

pub fn write_summary(rows: &[SummaryRow]) -> String {
    let mut out = String::new();
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(out, "{},{},{:.6},{:.6}", r.variant, r.episode, r.mean, r.max).unwrap();
    }
    out
}
