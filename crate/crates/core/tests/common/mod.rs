#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slicelife_core::agent::{
    advantages, gradient, surrogate_loss, AgentContext, AgentVariant, Choice, Providers, SamplingSupport,
    TrajectoryStep,
};
use slicelife_core::world::{self, run_walkthrough, step};
use slicelife_core::{
    shipped_data_dir, ActionCommand, CommandTemplate, ExtractionRules, FeatureVector, GameMode, GameSpec,
    PolicyParameters, ShapingConfig, TrainingConfig, Trajectory,
};

pub fn data(name: &str) -> PathBuf {
    shipped_data_dir().join(name)
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn spec() -> GameSpec {
    GameSpec::load(&data("nine05.spec")).unwrap()
}

pub fn rules() -> ExtractionRules {
    ExtractionRules::load(&data("extract.rules")).unwrap()
}

pub fn providers(shaping: ShapingConfig) -> Providers {
    Providers::load(&data("hasa.tsv"), &data("facts.tsv"), &data("corpus.txt"), shaping).unwrap()
}

/// Three states, three action-feature rows and a shaped step, small
/// enough to difference every parameter.
pub fn toy() -> (PolicyParameters, Trajectory, TrainingConfig) {
    let wait = CommandTemplate::new("wait", "wait");
    let look = CommandTemplate::new("look", "look");
    let sing = CommandTemplate::new("sing", "sing");
    let cands = vec![
        ActionCommand::new(&wait, vec![]),
        ActionCommand::new(&look, vec![]),
        ActionCommand::new(&sing, vec![]),
    ];
    let feats = vec![vec![0], vec![1], vec![1, 2]];
    let states = [
        vec![1.0, 0.0, 0.5, 0.0],
        vec![0.0, 1.0, 0.0, 1.0],
        vec![1.0, 1.0, 1.0, 0.0],
    ];
    let supports = [
        SamplingSupport::full(3),
        SamplingSupport {
            indices: vec![2, 0],
            offsets: vec![-0.3, -1.2],
            scale: 0.6,
        },
        SamplingSupport::full(3),
    ];
    let chosen = [1, 0, 2];
    let rewards = [0.0, 1.0, 1.0];

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut params = PolicyParameters::random(3, 4, 0.5, &mut rng);
    for v in params.critic_mut() {
        *v = rng.gen_range(-0.5..0.5);
    }
    let steps = (0..3)
        .map(|t| TrajectoryStep {
            features: FeatureVector::from_values(states[t].clone(), 2),
            command: cands[chosen[t]].clone(),
            candidates: cands.clone().into(),
            candidate_features: feats.clone().into(),
            chosen: chosen[t],
            support: supports[t].clone(),
            probability: 0.0,
            reward: rewards[t],
            value: 0.0,
        })
        .collect();
    let cfg = TrainingConfig {
        gamma: 0.9,
        entropy_coef: 0.1,
        value_coef: 0.5,
        ..TrainingConfig::default()
    };
    (params, Trajectory { steps }, cfg)
}

/// Largest relative disagreement between the analytic gradient and central
/// differences of the surrogate loss, with returns and advantages frozen at
/// `params`.
pub fn gradient_check(params: &PolicyParameters, traj: &Trajectory, cfg: &TrainingConfig, eps: f64) -> f64 {
    let analytic = gradient(params, traj, cfg).unwrap();
    let (returns, adv) = advantages(params, traj, cfg.gamma);
    let mut worst: f64 = 0.0;
    for i in 0..params.len() {
        let mut plus = params.clone();
        plus.set(i, params.get(i) + eps);
        let mut minus = params.clone();
        minus.set(i, params.get(i) - eps);
        let numeric = (surrogate_loss(&plus, traj, cfg, &returns, &adv)
            - surrogate_loss(&minus, traj, cfg, &returns, &adv))
            / (2.0 * eps);
        let a = analytic.get(i);
        let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6);
        worst = worst.max(rel);
    }
    worst
}

/// Episode under an arbitrary policy: with probability `greed` the earliest
/// not-yet-played walkthrough command that is currently a candidate,
/// otherwise a uniform pick.
pub fn fuzz_episode(
    ctx: &mut AgentContext<'_>,
    variant: AgentVariant,
    params: &PolicyParameters,
    walkthrough: &[ActionCommand],
    greed: f64,
    step_cap: u32,
    rng: &mut ChaCha8Rng,
) -> u32 {
    let mut next = 0;
    let ep = ctx
        .run_with(variant, params, step_cap, |view| {
            let scripted = walkthrough
                .iter()
                .enumerate()
                .skip(next)
                .find_map(|(w, cmd)| view.candidates.iter().position(|c| c == cmd).map(|i| (w, i)));
            let index = match scripted {
                Some((w, i)) if rng.gen_bool(greed) => {
                    next = w + 1;
                    i
                }
                _ => rng.gen_range(0..view.candidates.len()),
            };
            Ok(Choice {
                index,
                command: view.candidates[index].clone(),
                probability: 1.0,
                support: SamplingSupport::full(view.candidates.len()),
            })
        })
        .unwrap();
    ep.reward
}

/// Every instantiation of every template over the declared objects.
pub fn all_commands(spec: &GameSpec) -> Vec<ActionCommand> {
    let ids: Vec<_> = spec.objects().iter().map(|o| o.id.clone()).collect();
    let mut out = Vec::new();
    for t in spec.templates() {
        match t.arity() {
            0 => out.push(ActionCommand::new(&t, vec![])),
            1 => out.extend(ids.iter().map(|a| ActionCommand::new(&t, vec![a.clone()]))),
            _ => {
                for a in &ids {
                    for b in &ids {
                        out.push(ActionCommand::new(&t, vec![a.clone(), b.clone()]));
                    }
                }
            }
        }
    }
    out
}

/// Outcome of an engine-level checkpoint fuzz.
#[derive(Debug, Default)]
pub struct OrderFuzz {
    pub episodes: usize,
    pub violations: usize,
    pub deepest: u8,
}

/// Drives the engine with random commands, mixing in the walkthrough so
/// later checkpoints are reached, and checks that every observed mask is a
/// prefix and no checkpoint repeats.
pub fn checkpoint_order_fuzz(spec: &GameSpec, mode: GameMode, episodes: usize, seed: u64) -> OrderFuzz {
    let commands = all_commands(spec);
    let walk: Vec<ActionCommand> = spec
        .walkthrough()
        .iter()
        .map(|c| spec.parse_command(c).unwrap())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = OrderFuzz {
        episodes,
        ..OrderFuzz::default()
    };
    for _ in 0..episodes {
        let (mut state, _) = world::reset(spec, mode, 0);
        let mut next = 0;
        let mut fired: Vec<u8> = Vec::new();
        let greed = rng.gen_range(0.0..1.0);
        for _ in 0..80 {
            if state.terminal {
                break;
            }
            let cmd = if next < walk.len() && rng.gen_bool(greed) {
                next += 1;
                &walk[next - 1]
            } else {
                &commands[rng.gen_range(0..commands.len())]
            };
            let (after, obs) = step(&state, spec, mode, cmd).unwrap();
            let expected = state.checkpoint_mask.next_ordinal();
            let bad_fire = obs
                .checkpoint
                .is_some_and(|k| k != expected || fired.contains(&k));
            if !after.checkpoint_mask.is_prefix() || bad_fire {
                out.violations += 1;
            }
            if let Some(k) = obs.checkpoint {
                fired.push(k);
            }
            state = after;
        }
        out.deepest = out.deepest.max(state.checkpoint_mask.count());
    }
    out
}

pub fn walkthrough_result(mode: GameMode) -> (u32, u32) {
    run_walkthrough(&spec(), mode).unwrap()
}
