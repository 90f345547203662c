use crate::command::{ActionCommand, CommandTemplate};
use crate::extract::{EntityId, RelationLabel};
use crate::graph::KnowledgeGraph;
use crate::world::{GameSpec, SlotRule};

/// A command template plus the rule choosing which believed entities may
/// fill each of its slots.
#[derive(Debug, Clone)]
pub struct ActionTemplate {
    pub command: CommandTemplate,
    pub slots: Vec<SlotRule>,
}

impl ActionTemplate {
    pub fn new(command: CommandTemplate, slots: Vec<SlotRule>) -> Result<Self, String> {
        if command.arity() != slots.len() {
            return Err(format!(
                "template {:?} has {} slots but {} filler rules",
                command.verb(),
                command.arity(),
                slots.len()
            ));
        }
        if slots.len() > 2 {
            return Err(format!("template {:?} has more than two slots", command.verb()));
        }
        Ok(ActionTemplate { command, slots })
    }

    pub fn verb(&self) -> &str {
        self.command.verb()
    }

    pub fn arity(&self) -> usize {
        self.slots.len()
    }
}

/// One template per declared verb, in declaration order.
pub fn templates_from_spec(spec: &GameSpec) -> Vec<ActionTemplate> {
    spec.verbs()
        .iter()
        .map(|v| ActionTemplate {
            command: v.template.clone(),
            slots: v.slots.clone(),
        })
        .collect()
}

struct Fillers {
    local: Vec<EntityId>,
    carried: Vec<EntityId>,
    worn: Vec<EntityId>,
    local_or_carried: Vec<EntityId>,
}

impl Fillers {
    fn new(kg: &KnowledgeGraph, location: &EntityId) -> Self {
        let player = EntityId::player();
        let sorted = |mut v: Vec<EntityId>| {
            v.retain(|e| e != &player && e != location);
            v.sort();
            v.dedup();
            v
        };
        let local = sorted(
            kg.subjects_with(RelationLabel::In, location)
                .into_iter()
                .cloned()
                .collect(),
        );
        let worn = sorted(
            kg.objects_of(&player, RelationLabel::Wearing)
                .into_iter()
                .cloned()
                .collect(),
        );
        let carried = sorted(
            kg.objects_of(&player, RelationLabel::Has)
                .into_iter()
                .chain(kg.objects_of(&player, RelationLabel::Wearing))
                .cloned()
                .collect(),
        );
        let local_or_carried = sorted(local.iter().chain(&carried).cloned().collect());
        Fillers {
            local,
            carried,
            worn,
            local_or_carried,
        }
    }

    fn get(&self, rule: SlotRule) -> &[EntityId] {
        match rule {
            SlotRule::Local => &self.local,
            SlotRule::Carried => &self.carried,
            SlotRule::Worn => &self.worn,
            SlotRule::LocalOrCarried => &self.local_or_carried,
        }
    }
}

/// Instantiates every template with every permitted filling drawn from the
/// graph, then filters. Order is template order, then lexicographic
/// arguments. A template cannot name the same entity twice.
///
/// Slot rules read the graph: local means `<e, In, location>`, carried means
/// the player `Has` or is `Wearing` e, and worn means `Wearing`.
pub fn generate_candidates(
    kg: &KnowledgeGraph,
    templates: &[ActionTemplate],
    location: &EntityId,
) -> Vec<ActionCommand> {
    let fillers = Fillers::new(kg, location);
    let mut out = Vec::new();
    for t in templates {
        match t.slots.as_slice() {
            [] => out.push(ActionCommand::new(&t.command, Vec::new())),
            [a] => {
                for e in fillers.get(*a) {
                    out.push(ActionCommand::new(&t.command, vec![e.clone()]));
                }
            }
            [a, b] => {
                for x in fillers.get(*a) {
                    for y in fillers.get(*b) {
                        if x != y {
                            out.push(ActionCommand::new(&t.command, vec![x.clone(), y.clone()]));
                        }
                    }
                }
            }
            _ => unreachable!("ActionTemplate::new rejects arity above two"),
        }
    }
    kg.filter_commands(&out)
}
