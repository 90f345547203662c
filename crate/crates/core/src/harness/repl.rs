use std::collections::BTreeSet;
use std::io::{self, BufRead, Write};

use crate::agent::Providers;
use crate::commonsense::{infer_hasa, qa_infer};
use crate::extract::{extract, EntityId, ExtractionRules};
use crate::graph::KnowledgeGraph;
use crate::world::{self, GameMode, GameSpec, Observation, WorldState};

struct BeliefView<'a> {
    rules: &'a ExtractionRules,
    providers: Option<&'a Providers>,
    kg: KnowledgeGraph,
    visited: BTreeSet<EntityId>,
}

impl BeliefView<'_> {
    fn observe(&mut self, obs: &Observation, state: &WorldState, spec: &GameSpec, mode: GameMode) {
        let loc = &obs.location_id;
        let room = world::render(state, spec, mode);
        let mut triples = extract(&obs.text, loc, self.rules);
        triples.extend(extract(&room, loc, self.rules));
        self.kg = std::mem::take(&mut self.kg).update(triples);
        if let Some(p) = self.providers {
            if self.visited.insert(loc.clone()) {
                let mut extra = infer_hasa(&p.hasa, loc);
                extra.extend(qa_infer(&p.facts, &p.questions, loc, &self.kg));
                self.kg = std::mem::take(&mut self.kg).update(extra);
            }
        }
    }
}

/// Line-oriented play session. Prints each observation followed by the
/// cumulative reward. `quit` ends the session; `debug kg` prints the belief
/// graph built from what has been seen, plus commonsense triples when
/// `providers` is given. Returns the final cumulative reward.
pub fn repl<R: BufRead, W: Write>(
    spec: &GameSpec,
    mode: GameMode,
    rules: &ExtractionRules,
    providers: Option<&Providers>,
    input: R,
    mut output: W,
) -> io::Result<u32> {
    let (mut state, obs) = world::reset(spec, mode, 0);
    let mut view = BeliefView {
        rules,
        providers,
        kg: KnowledgeGraph::new(),
        visited: BTreeSet::new(),
    };
    view.observe(&obs, &state, spec, mode);
    let mut total = 0u32;
    writeln!(output, "{}", obs.text)?;
    write!(output, "> ")?;
    output.flush()?;
    for line in input.lines() {
        let line = line?;
        let command = line.trim();
        match command {
            "" => {}
            "quit" => break,
            "debug kg" => write!(output, "{}", view.kg.dump())?,
            _ => {
                let (next, obs) = match world::step_text(&state, spec, mode, command) {
                    Ok(r) => r,
                    Err(e) => {
                        writeln!(output, "{e}")?;
                        break;
                    }
                };
                state = next;
                total += obs.reward;
                view.observe(&obs, &state, spec, mode);
                writeln!(output, "{}", obs.text)?;
                writeln!(output, "[reward: {total}]")?;
                if obs.done {
                    writeln!(output, "*** The game is over. ***")?;
                    break;
                }
            }
        }
        write!(output, "> ")?;
        output.flush()?;
    }
    writeln!(output)?;
    Ok(total)
}
