use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;
use std::rc::Rc;

use rand::Rng;

use super::a2c::{SamplingSupport, TrainingConfig, Trajectory, TrajectoryStep};
use super::candidates::{generate_candidates, templates_from_spec, ActionTemplate};
use super::policy::{softmax, ActionFeaturizer, PolicyParameters};
use super::{AgentError, AgentVariant, Providers};
use crate::command::ActionCommand;
use crate::commonsense::{infer_hasa, qa_infer, top_k};
use crate::extract::{extract, EntityId, ExtractionRules, Triple};
use crate::graph::{observation_bins, FeatureVector, KnowledgeGraph, Vocabulary, DEFAULT_HASH_WIDTH};
use crate::world::{self, GameMode, GameSpec, Observation, WorldState, CHECKPOINT_COUNT};

/// Every entity the belief graph can ever hold under `rules` and
/// `providers`, plus everything the game declares.
pub fn build_vocabulary(
    spec: &GameSpec,
    rules: &ExtractionRules,
    providers: &Providers,
    hash_width: usize,
) -> Vocabulary {
    let mut ids: BTreeSet<EntityId> = spec.entities().into_iter().collect();
    ids.extend(rules.entities());
    ids.extend(providers.hasa.entities());
    ids.extend(providers.facts.entities());
    Vocabulary::new(ids, hash_width)
}

/// A sampled action and the distribution it came from.
#[derive(Debug, Clone)]
pub struct Choice {
    pub index: usize,
    pub command: ActionCommand,
    pub probability: f64,
    pub support: SamplingSupport,
}

/// Samples an action. Baseline, HasA and QA sample from the policy softmax;
/// Shaped samples from its re-ranked shortlist. The returned probability is
/// under the distribution actually sampled from.
#[allow(clippy::too_many_arguments)]
pub fn act<R: Rng>(
    variant: AgentVariant,
    params: &PolicyParameters,
    state: &FeatureVector,
    candidates: &[ActionCommand],
    candidate_features: &[Vec<usize>],
    history: &[ActionCommand],
    providers: &Providers,
    rng: &mut R,
) -> Choice {
    assert!(!candidates.is_empty(), "act needs at least one candidate");
    let logits = params.logits(state, candidate_features);
    let policy = softmax(&logits);
    let (support, probs) = match variant {
        AgentVariant::Shaped => {
            let cfg = &providers.shaping;
            let dist: Vec<(ActionCommand, f64)> = candidates.iter().cloned().zip(policy).collect();
            let shortlist = top_k(&dist, cfg.k);
            let reranked = crate::commonsense::rerank(&dist, &providers.sequence, history, cfg);
            let offsets = shortlist
                .iter()
                .map(|&i| cfg.lambda * providers.sequence.score_sequence(history, &candidates[i]))
                .collect();
            let probs = reranked.into_iter().map(|(_, p)| p).collect::<Vec<_>>();
            let support = SamplingSupport {
                indices: shortlist,
                offsets,
                scale: 1.0 - cfg.lambda,
            };
            (support, probs)
        }
        _ => (SamplingSupport::full(candidates.len()), policy),
    };
    let index = sample(&probs, rng);
    Choice {
        index,
        command: candidates[index].clone(),
        probability: probs[index],
        support,
    }
}

fn sample<R: Rng>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, p) in probs.iter().enumerate() {
        if *p > 0.0 {
            acc += p;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}

/// Result of one episode.
#[derive(Debug, Clone)]
pub struct Episode {
    pub trajectory: Trajectory,
    pub reward: u32,
    pub steps: u32,
    /// Step (1-based) at which each checkpoint first fired.
    pub checkpoints: [Option<u32>; CHECKPOINT_COUNT as usize],
}

/// What the agent knows when it picks an action.
pub struct StepView<'v> {
    pub step: usize,
    pub kg: &'v KnowledgeGraph,
    pub features: &'v FeatureVector,
    pub candidates: &'v [ActionCommand],
    pub candidate_features: &'v [Vec<usize>],
    pub history: &'v [ActionCommand],
}

struct Cached {
    triples: Vec<Triple>,
    bins: Vec<usize>,
}

/// Everything fixed for one (game, mode, providers) combination, plus
/// per-text caches. One context per execution thread.
pub struct AgentContext<'a> {
    spec: &'a GameSpec,
    mode: GameMode,
    rules: &'a ExtractionRules,
    providers: &'a Providers,
    templates: Vec<ActionTemplate>,
    vocab: Vocabulary,
    featurizer: ActionFeaturizer,
    cache: HashMap<EntityId, HashMap<String, Rc<Cached>>>,
}

impl<'a> AgentContext<'a> {
    pub fn new(spec: &'a GameSpec, mode: GameMode, rules: &'a ExtractionRules, providers: &'a Providers) -> Self {
        let vocab = build_vocabulary(spec, rules, providers, DEFAULT_HASH_WIDTH);
        let templates = templates_from_spec(spec);
        let featurizer = ActionFeaturizer::new(templates.iter().map(|t| t.verb().to_string()), &vocab);
        AgentContext {
            spec,
            mode,
            rules,
            providers,
            templates,
            vocab,
            featurizer,
            cache: HashMap::new(),
        }
    }

    pub fn spec(&self) -> &'a GameSpec {
        self.spec
    }

    pub fn mode(&self) -> GameMode {
        self.mode
    }

    pub fn providers(&self) -> &'a Providers {
        self.providers
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn featurizer(&self) -> &ActionFeaturizer {
        &self.featurizer
    }

    pub fn templates(&self) -> &[ActionTemplate] {
        &self.templates
    }

    /// Fresh parameters with the shapes this context needs.
    pub fn init_params<R: Rng>(&self, cfg: &TrainingConfig, rng: &mut R) -> PolicyParameters {
        PolicyParameters::random(self.featurizer.dim(), self.vocab.feature_dim(), cfg.init_scale, rng)
    }

    fn analyse(&mut self, text: &str, location: &EntityId) -> Rc<Cached> {
        let per_loc = self.cache.entry(location.clone()).or_default();
        if let Some(c) = per_loc.get(text) {
            return Rc::clone(c);
        }
        let c = Rc::new(Cached {
            triples: extract(text, location, self.rules),
            bins: observation_bins(text, self.vocab.hash_width()),
        });
        per_loc.insert(text.to_string(), Rc::clone(&c));
        c
    }

    /// Commonsense triples for `location` under `variant`.
    pub fn augment(&self, variant: AgentVariant, location: &EntityId, kg: &KnowledgeGraph) -> Vec<Triple> {
        match variant {
            AgentVariant::Baseline | AgentVariant::Shaped => Vec::new(),
            AgentVariant::HasA => infer_hasa(&self.providers.hasa, location),
            AgentVariant::QA => qa_infer(&self.providers.facts, &self.providers.questions, location, kg),
        }
    }

    /// The agent's view of a step: the engine response followed by the
    /// current room rendering, unless the response already is that
    /// rendering.
    pub fn observation_text(&self, obs: &Observation, state: &WorldState) -> String {
        let room = world::render(state, self.spec, self.mode);
        if obs.text == room {
            room
        } else {
            format!("{}\n{}", obs.text, room)
        }
    }

    /// Runs one episode, asking `choose` for each action.
    pub fn run_with<F>(&mut self, variant: AgentVariant, params: &PolicyParameters, step_cap: u32, mut choose: F) -> Result<Episode, AgentError>
    where
        F: FnMut(&StepView<'_>) -> Result<Choice, AgentError>,
    {
        let (mut state, mut obs) = world::reset(self.spec, self.mode, 0);
        let mut kg = KnowledgeGraph::new();
        let mut visited: BTreeSet<EntityId> = BTreeSet::new();
        let mut history: Vec<ActionCommand> = Vec::new();
        let mut trajectory = Trajectory::default();
        let mut reward = 0u32;
        let mut checkpoints = [None; CHECKPOINT_COUNT as usize];
        // The graph only grows, so its size identifies it within an episode.
        let mut candidate_key: Option<(usize, EntityId)> = None;
        let mut candidates: Arc<[ActionCommand]> = Arc::new([]);
        let mut candidate_features: Arc<[Vec<usize>]> = Arc::new([]);

        for t in 0..step_cap as usize {
            let location = obs.location_id.clone();
            let room = world::render(&state, self.spec, self.mode);
            let response = self.analyse(&obs.text, &location);
            let mut bins = response.bins.clone();
            let mut new_triples = response.triples.clone();
            if obs.text != room {
                let r = self.analyse(&room, &location);
                new_triples.extend(r.triples.iter().cloned());
                bins.extend(&r.bins);
                bins.sort_unstable();
                bins.dedup();
            }
            kg = kg.update(new_triples);
            if visited.insert(location.clone()) {
                let extra = self.augment(variant, &location, &kg);
                kg = kg.update(extra);
            }
            let features = kg.encode_with_bins(&bins, &self.vocab);
            let key = (kg.len(), location.clone());
            if candidate_key.as_ref() != Some(&key) {
                candidates = generate_candidates(&kg, &self.templates, &location).into();
                candidate_features = candidates.iter().map(|c| self.featurizer.features(c)).collect();
                candidate_key = Some(key);
            }

            let choice = choose(&StepView {
                step: t,
                kg: &kg,
                features: &features,
                candidates: &candidates,
                candidate_features: &candidate_features,
                history: &history,
            })?;
            let (next, o) = world::step(&state, self.spec, self.mode, &choice.command)?;
            state = next;
            reward += o.reward;
            if let Some(k) = o.checkpoint {
                let slot = &mut checkpoints[usize::from(k) - 1];
                if slot.is_none() {
                    *slot = Some(t as u32 + 1);
                }
            }
            trajectory.steps.push(TrajectoryStep {
                value: params.value(&features),
                features,
                command: choice.command.clone(),
                candidates: Arc::clone(&candidates),
                candidate_features: Arc::clone(&candidate_features),
                chosen: choice.index,
                support: choice.support,
                probability: choice.probability,
                reward: f64::from(o.reward),
            });
            history.push(choice.command);
            let done = o.done;
            obs = o;
            if done {
                break;
            }
        }
        Ok(Episode {
            steps: trajectory.len() as u32,
            trajectory,
            reward,
            checkpoints,
        })
    }

    /// One episode under the learned policy.
    pub fn run_episode<R: Rng>(
        &mut self,
        variant: AgentVariant,
        params: &PolicyParameters,
        cfg: &TrainingConfig,
        rng: &mut R,
    ) -> Result<Episode, AgentError> {
        let providers = self.providers;
        self.run_with(variant, params, cfg.step_cap, |view| {
            Ok(act(
                variant,
                params,
                view.features,
                view.candidates,
                view.candidate_features,
                view.history,
                providers,
                rng,
            ))
        })
    }

    /// Replays `commands` with probability forced to 1. Every command must
    /// be among the generated candidates at its step.
    pub fn run_scripted(
        &mut self,
        variant: AgentVariant,
        params: &PolicyParameters,
        commands: &[String],
        step_cap: u32,
    ) -> Result<Episode, AgentError> {
        let spec = self.spec;
        self.run_with(variant, params, step_cap.min(commands.len() as u32), |view| {
            let text = &commands[view.step];
            let wanted = spec.parse_command(text);
            let index = view
                .candidates
                .iter()
                .position(|c| Some(c) == wanted.as_ref())
                .ok_or_else(|| AgentError::NotACandidate {
                    step: view.step,
                    command: text.clone(),
                })?;
            Ok(Choice {
                index,
                command: view.candidates[index].clone(),
                probability: 1.0,
                support: SamplingSupport {
                    indices: vec![index],
                    offsets: vec![0.0],
                    scale: 1.0,
                },
            })
        })
    }
}
