mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use slicelife_core::agent::{a2c_update, act, AgentContext, AgentError, AgentVariant};
use slicelife_core::world::MAX_EPISODE_REWARD;
use slicelife_core::{GameMode, ShapingConfig, TrainingConfig};

#[test]
fn scripted_walkthrough_scores_seven_with_commonsense() {
    let spec = common::spec();
    let rules = common::rules();
    let p = common::providers(ShapingConfig::default());
    for (variant, mode) in [
        (AgentVariant::HasA, GameMode::Ablated),
        (AgentVariant::QA, GameMode::Ablated),
        (AgentVariant::Baseline, GameMode::Full),
    ] {
        let mut ctx = AgentContext::new(&spec, mode, &rules, &p);
        let params = ctx.init_params(&TrainingConfig::default(), &mut ChaCha8Rng::seed_from_u64(0));
        let ep = ctx.run_scripted(variant, &params, spec.walkthrough(), 60).unwrap();
        assert_eq!(ep.reward, MAX_EPISODE_REWARD, "{variant} {mode}");
        assert!(ep.checkpoints.iter().all(Option::is_some));
    }
}

#[test]
fn baseline_cannot_name_the_toilet_when_ablated() {
    let spec = common::spec();
    let rules = common::rules();
    let p = common::providers(ShapingConfig::default());
    let mut ctx = AgentContext::new(&spec, GameMode::Ablated, &rules, &p);
    let params = ctx.init_params(&TrainingConfig::default(), &mut ChaCha8Rng::seed_from_u64(0));
    match ctx.run_scripted(AgentVariant::Baseline, &params, spec.walkthrough(), 60) {
        Err(AgentError::NotACandidate { command, .. }) => assert_eq!(command, "use toilet"),
        other => panic!("expected NotACandidate, got {other:?}"),
    }
}

#[test]
fn step_cap_bounds_the_trajectory() {
    let spec = common::spec();
    let rules = common::rules();
    let p = common::providers(ShapingConfig::default());
    let mut ctx = AgentContext::new(&spec, GameMode::Full, &rules, &p);
    let cfg = TrainingConfig {
        step_cap: 1,
        ..TrainingConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let params = ctx.init_params(&cfg, &mut rng);
    for v in AgentVariant::ALL {
        let ep = ctx.run_episode(v, &params, &cfg, &mut rng).unwrap();
        assert_eq!(ep.trajectory.len(), 1);
        assert_eq!(ep.steps, 1);
    }
}

#[test]
fn sampled_distributions_are_proper() {
    let spec = common::spec();
    let rules = common::rules();
    let p = common::providers(ShapingConfig::default());
    let mut ctx = AgentContext::new(&spec, GameMode::Full, &rules, &p);
    let cfg = TrainingConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let params = ctx.init_params(&cfg, &mut rng);
    for v in AgentVariant::ALL {
        let ep = ctx.run_episode(v, &params, &cfg, &mut rng).unwrap();
        for s in &ep.trajectory.steps {
            let q = s.support.distribution(&params.logits(&s.features, &s.candidate_features));
            assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            let pos = s.support.indices.iter().position(|&i| i == s.chosen).unwrap();
            assert!((q[pos] - s.probability).abs() < 1e-12);
            assert!(s.probability > 0.0);
        }
        let next = a2c_update(&params, &ep.trajectory, &cfg).unwrap();
        assert!(next.is_finite());
    }
}

/// Shared setup for single-decision checks: the bedroom after getting up.
fn bedroom_decision(
    shaping: ShapingConfig,
    f: impl Fn(&slicelife_core::agent::Providers, &slicelife_core::agent::StepView<'_>, &slicelife_core::PolicyParameters),
) {
    let spec = common::spec();
    let rules = common::rules();
    let p = common::providers(shaping);
    let mut ctx = AgentContext::new(&spec, GameMode::Full, &rules, &p);
    let params = ctx.init_params(&TrainingConfig::default(), &mut ChaCha8Rng::seed_from_u64(9));
    let script = ["get up".to_string(), "look".to_string()];
    let mut index = 0;
    ctx.run_with(AgentVariant::Baseline, &params, 2, |view| {
        if view.step == 1 {
            f(&p, view, &params);
        }
        let want = spec.parse_command(&script[index]).unwrap();
        index += 1;
        let i = view.candidates.iter().position(|c| *c == want).unwrap();
        Ok(slicelife_core::agent::Choice {
            index: i,
            command: want,
            probability: 1.0,
            support: slicelife_core::agent::SamplingSupport::full(view.candidates.len()),
        })
    })
    .unwrap();
}

#[test]
fn shaping_without_weight_or_cutoff_is_the_policy() {
    let shaping = ShapingConfig {
        k: usize::MAX,
        lambda: 0.0,
        ..ShapingConfig::default()
    };
    bedroom_decision(shaping, |p, view, params| {
        let draw = |v| {
            act(
                v,
                params,
                view.features,
                view.candidates,
                view.candidate_features,
                view.history,
                p,
                &mut ChaCha8Rng::seed_from_u64(1),
            )
        };
        let base = draw(AgentVariant::Baseline);
        let shaped = draw(AgentVariant::Shaped);
        assert_eq!(base.index, shaped.index);
        assert!((base.probability - shaped.probability).abs() < 1e-12);
        let logits = params.logits(view.features, view.candidate_features);
        let mut a = base.support.distribution(&logits);
        let mut b: Vec<f64> = shaped.support.distribution(&logits);
        // Same distribution, possibly listed in a different order.
        let order = |s: &slicelife_core::agent::SamplingSupport, v: &mut Vec<f64>| {
            let mut pairs: Vec<(usize, f64)> = s.indices.iter().copied().zip(v.iter().copied()).collect();
            pairs.sort_by_key(|x| x.0);
            *v = pairs.into_iter().map(|x| x.1).collect();
        };
        order(&base.support, &mut a);
        order(&shaped.support, &mut b);
        assert_eq!(a.len(), b.len());
        // Summation order differs, so allow for rounding.
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12));
    });
}

#[test]
fn shortlist_of_one_takes_the_argmax() {
    let shaping = ShapingConfig {
        k: 1,
        ..ShapingConfig::default()
    };
    bedroom_decision(shaping, |p, view, params| {
        let logits = params.logits(view.features, view.candidate_features);
        let best = (0..logits.len()).max_by(|&a, &b| logits[a].total_cmp(&logits[b])).unwrap();
        for seed in 0..5 {
            let c = act(
                AgentVariant::Shaped,
                params,
                view.features,
                view.candidates,
                view.candidate_features,
                view.history,
                p,
                &mut ChaCha8Rng::seed_from_u64(seed),
            );
            assert_eq!(c.index, best);
            assert_eq!(c.probability, 1.0);
        }
    });
}

#[test]
fn act_is_deterministic_under_a_fixed_seed() {
    bedroom_decision(ShapingConfig::default(), |p, view, params| {
        for v in AgentVariant::ALL {
            let draw = || {
                act(
                    v,
                    params,
                    view.features,
                    view.candidates,
                    view.candidate_features,
                    view.history,
                    p,
                    &mut ChaCha8Rng::seed_from_u64(42),
                )
                .index
            };
            assert_eq!(draw(), draw());
        }
    });
}

#[test]
fn toy_gradient_matches_finite_differences() {
    let (params, traj, cfg) = common::toy();
    let worst = common::gradient_check(&params, &traj, &cfg, 1e-5);
    assert!(worst < 1e-4, "relative error {worst}");
}

#[test]
fn zero_reward_episode_leaves_a_zero_critic_alone() {
    let (mut params, mut traj, cfg) = common::toy();
    for v in params.critic_mut() {
        *v = 0.0;
    }
    for s in &mut traj.steps {
        s.reward = 0.0;
    }
    let g = slicelife_core::agent::gradient(&params, &traj, &cfg).unwrap();
    assert!(g.critic().iter().all(|x| *x == 0.0));
}
