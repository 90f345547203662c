use proptest::prelude::*;

use super::*;
use crate::command::ActionCommand;
use crate::extract::EntityId;
use crate::shipped_data_dir;

fn spec_text() -> String {
    std::fs::read_to_string(shipped_data_dir().join("nine05.spec")).unwrap()
}

fn spec() -> GameSpec {
    GameSpec::parse(&spec_text()).unwrap()
}

/// Every instantiation of every template over the declared objects.
fn all_commands(spec: &GameSpec) -> Vec<ActionCommand> {
    let ids: Vec<EntityId> = spec.objects().iter().map(|o| o.id.clone()).collect();
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

/// Plays `commands` from reset; each must succeed.
fn play(spec: &GameSpec, mode: GameMode, commands: &[&str]) -> WorldState {
    let (mut state, _) = reset(spec, mode, 0);
    for c in commands {
        let (next, obs) = step_text(&state, spec, mode, c).unwrap();
        assert!(!obs.failed, "{c}: {}", obs.text);
        state = next;
    }
    state
}

const TO_BATHROOM: [&str; 2] = ["get up", "go south"];
const TO_SHOWER: [&str; 7] = [
    "get up",
    "go south",
    "use toilet",
    "wash hands in sink",
    "remove watch",
    "remove soiled clothes",
    "drop soiled clothes",
];

#[test]
fn shipped_spec_shape() {
    let s = spec();
    let rooms: Vec<&str> = s.rooms().iter().map(|r| r.id.as_str()).collect();
    for r in ["bed_nook", "bedroom", "bathroom", "living_room"] {
        assert!(rooms.contains(&r), "missing room {r}");
    }
    let names: Vec<&str> = s.checkpoints().iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, CHECKPOINT_NAMES);
    assert!(s.distractors().objects.len() >= 10);
    assert!(s.distractors().verbs.len() >= 8);
}

#[test]
fn undeclared_exit_is_named() {
    let text = spec_text().replace("exits=west:bedroom", "exits=west:garage");
    let err = GameSpec::parse(&text).unwrap_err().to_string();
    assert!(err.contains("garage"), "{err}");
}

#[test]
fn short_walkthrough_is_rejected() {
    let text = spec_text().replace("examine couch\n", "");
    assert_eq!(GameSpec::parse(&text).unwrap().walkthrough().len(), 25);
    let text = text.replace("examine mirror\n", "");
    let err = GameSpec::parse(&text).unwrap_err().to_string();
    assert_eq!(err, "walkthrough length 24 outside [25,30]");
}

#[test]
fn reset_is_fresh_and_deterministic() {
    let s = spec();
    let (a, oa) = reset(&s, GameMode::Full, 0);
    let (b, ob) = reset(&s, GameMode::Full, 0);
    assert_eq!(a, b);
    assert_eq!(oa, ob);
    assert_eq!(a.checkpoint_mask.bits(), 0);
    assert!(!oa.done);
    assert_eq!(oa.reward, 0);
    assert_eq!(a.player_location.as_str(), "bed_nook");

    let (c, oc) = reset(&s, GameMode::Ablated, 0);
    assert_eq!(a, c);
    assert_eq!(oa.text, oc.text);
}

#[test]
fn entering_the_bathroom_is_checkpoint_two() {
    let s = spec();
    let state = play(&s, GameMode::Full, &["get up"]);
    assert_eq!(state.player_location.as_str(), "bedroom");
    let (next, obs) = step_text(&state, &s, GameMode::Full, "go south").unwrap();
    assert_eq!(next.player_location.as_str(), "bathroom");
    assert_eq!(obs.reward, 1);
    assert_eq!(obs.checkpoint, Some(2));
    assert_eq!(next.checkpoint_mask.bits(), 0b11);
}

#[test]
fn shower_after_the_first_five_checkpoints() {
    let s = spec();
    let state = play(&s, GameMode::Full, &TO_SHOWER);
    assert_eq!(state.checkpoint_mask.bits(), 0b1_1111);
    let (next, obs) = step_text(&state, &s, GameMode::Full, "enter shower").unwrap();
    assert_eq!(obs.reward, 1);
    assert_eq!(obs.checkpoint, Some(6));
    assert!(next.checkpoint_mask.contains(6));
}

#[test]
fn shower_refused_while_wearing_the_watch() {
    let s = spec();
    let state = play(&s, GameMode::Full, &TO_BATHROOM);
    assert_eq!(state.checkpoint_mask.bits(), 0b11);
    let (next, obs) = step_text(&state, &s, GameMode::Full, "enter shower").unwrap();
    assert!(obs.failed);
    assert_eq!(obs.text, "You can't shower like this.");
    assert_eq!(obs.reward, 0);
    assert_eq!(next.checkpoint_mask, state.checkpoint_mask);
}

#[test]
fn unparseable_text_is_a_failed_step() {
    let s = spec();
    let (state, _) = reset(&s, GameMode::Full, 0);
    let (next, obs) = step_text(&state, &s, GameMode::Full, "xyzzy").unwrap();
    assert!(obs.failed);
    assert_eq!(obs.reward, 0);
    assert_eq!(next.step_count, 1);
}

#[test]
fn stepping_a_finished_game_is_an_error() {
    let s = spec();
    let state = play(&s, GameMode::Full, &s.walkthrough().iter().map(String::as_str).collect::<Vec<_>>());
    assert!(state.terminal);
    assert_eq!(step_text(&state, &s, GameMode::Full, "wait"), Err(EngineError::Terminal));
}

#[test]
fn bathroom_rendering_by_mode() {
    let s = spec();
    let state = play(&s, GameMode::Full, &TO_BATHROOM);
    let full = render(&state, &s, GameMode::Full);
    for noun in ["sink", "toilet", "shower"] {
        assert!(full.contains(noun), "{full}");
    }
    let ablated = render(&state, &s, GameMode::Ablated);
    for noun in ["sink", "toilet", "shower"] {
        assert!(!ablated.contains(noun), "{ablated}");
    }
    let kept: Vec<&str> = full.lines().filter(|l| !["sink", "toilet", "shower"].iter().any(|n| l.contains(n))).collect();
    assert_eq!(ablated.lines().collect::<Vec<_>>(), kept);
}

#[test]
fn bedroom_rendering_ignores_mode() {
    let s = spec();
    let state = play(&s, GameMode::Full, &["get up"]);
    assert_eq!(render(&state, &s, GameMode::Full), render(&state, &s, GameMode::Ablated));
}

#[test]
fn walkthrough_scores_seven_in_both_modes() {
    let s = spec();
    for mode in [GameMode::Full, GameMode::Ablated] {
        let (reward, steps) = run_walkthrough(&s, mode).unwrap();
        assert_eq!(reward, MAX_EPISODE_REWARD);
        assert!((WALKTHROUGH_MIN as u32..=WALKTHROUGH_MAX as u32).contains(&steps));
    }
}

#[test]
fn walkthrough_without_removing_the_watch_fails() {
    let text = spec_text().replace("remove watch\n", "");
    let s = GameSpec::parse(&text).unwrap();
    match run_walkthrough(&s, GameMode::Full) {
        Err(WalkthroughError::CommandFailed { command, .. }) => assert_eq!(command, "remove soiled clothes"),
        other => panic!("expected a failed command, got {other:?}"),
    }
}

#[test]
fn game_handle_matches_free_functions() {
    let s = spec();
    let (mut game, first) = Game::new(&s, GameMode::Ablated, 0);
    let (state, obs) = reset(&s, GameMode::Ablated, 0);
    assert_eq!(first, obs);
    let a = game.step_text("get up").unwrap();
    let (_, b) = step_text(&state, &s, GameMode::Ablated, "get up").unwrap();
    assert_eq!(a, b);
    assert_eq!(game.state().player_location.as_str(), "bedroom");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn checkpoints_fire_in_order_and_once(picks in prop::collection::vec(any::<prop::sample::Index>(), 1..120)) {
        let s = spec();
        let commands = all_commands(&s);
        let (mut state, _) = reset(&s, GameMode::Full, 0);
        let mut fired = Vec::new();
        let mut total = 0;
        for p in picks {
            if state.terminal {
                break;
            }
            let (next, obs) = step(&state, &s, GameMode::Full, p.get(&commands)).unwrap();
            prop_assert!(next.checkpoint_mask.is_prefix());
            prop_assert!(obs.reward <= 2);
            prop_assert!(!obs.text.is_empty());
            if let Some(k) = obs.checkpoint {
                prop_assert_eq!(k, state.checkpoint_mask.next_ordinal());
                prop_assert!(!fired.contains(&k));
                fired.push(k);
            }
            total += obs.reward;
            state = next;
        }
        prop_assert!(total <= MAX_EPISODE_REWARD);
    }

    #[test]
    fn ablation_only_changes_text(picks in prop::collection::vec(any::<prop::sample::Index>(), 1..80)) {
        let s = spec();
        let commands = all_commands(&s);
        let (mut full, _) = reset(&s, GameMode::Full, 0);
        let (mut ablated, _) = reset(&s, GameMode::Ablated, 0);
        for p in picks {
            if full.terminal {
                break;
            }
            let c = p.get(&commands);
            let (f, of) = step(&full, &s, GameMode::Full, c).unwrap();
            let (a, oa) = step(&ablated, &s, GameMode::Ablated, c).unwrap();
            prop_assert_eq!(&f, &a);
            prop_assert_eq!((of.reward, of.done, of.checkpoint), (oa.reward, oa.done, oa.checkpoint));
            full = f;
            ablated = a;
        }
    }

    #[test]
    fn steps_are_deterministic(picks in prop::collection::vec(any::<prop::sample::Index>(), 1..40)) {
        let s = spec();
        let commands = all_commands(&s);
        let run = || {
            let (mut state, _) = reset(&s, GameMode::Ablated, 7);
            let mut texts = Vec::new();
            for p in &picks {
                if state.terminal {
                    break;
                }
                let (next, obs) = step(&state, &s, GameMode::Ablated, p.get(&commands)).unwrap();
                texts.push(obs.text);
                state = next;
            }
            (state, texts)
        };
        prop_assert_eq!(run(), run());
    }
}
