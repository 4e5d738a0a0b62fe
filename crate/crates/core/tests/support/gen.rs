//! Random well-formed documents for property tests.
//!
//! The strategy draws raw index material and a deterministic builder turns it
//! into a valid model: candidate flows that break the legality matrix,
//! duplicate an edge or touch an unlabeled action are dropped, regions are
//! grown along edges so they stay connected, and scenario choices only name
//! real successors.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use proptest::prelude::*;
use tm_core::events::EventDef;
use tm_core::metamodel::ThingTag;
use tm_core::{extract_region, flow_legal, ActionId, ActionKind, EventId, ModelDocument, Scenario, StaticModel, ThimacId};

/// Choices as (decision index, pick indices), then injection indices.
type RawScenario = (Vec<(usize, Vec<usize>)>, Vec<usize>);

#[derive(Debug, Clone)]
pub struct Raw {
    thimacs: Vec<(usize, u8)>,
    actions: Vec<(usize, u8, bool, bool)>,
    flows: Vec<(usize, usize)>,
    triggers: Vec<(usize, usize)>,
    events: Vec<(usize, usize, u8)>,
    scenarios: Vec<RawScenario>,
}

const DESCRIPTIONS: [&str; 4] = ["plain", "with \"quotes\"", "back\\slash", "two\nlines"];

fn raw() -> impl Strategy<Value = Raw> {
    (
        prop::collection::vec((any::<usize>(), 0u8..3), 0..6),
        prop::collection::vec((any::<usize>(), 0u8..5, prop::bool::weighted(0.85), any::<bool>()), 0..24),
        prop::collection::vec((any::<usize>(), any::<usize>()), 0..40),
        prop::collection::vec((any::<usize>(), any::<usize>()), 0..10),
        prop::collection::vec((any::<usize>(), 1usize..6, 0u8..5), 0..5),
        prop::collection::vec(
            (
                prop::collection::vec((any::<usize>(), prop::collection::vec(any::<usize>(), 1..3)), 0..4),
                prop::collection::vec(any::<usize>(), 0..3),
            ),
            0..3,
        ),
    )
        .prop_map(|(thimacs, actions, flows, triggers, events, scenarios)| Raw {
            thimacs,
            actions,
            flows,
            triggers,
            events,
            scenarios,
        })
}

/// A document that validates without errors and can be serialized.
pub fn document() -> impl Strategy<Value = ModelDocument> {
    raw().prop_map(|r| build(&r))
}

pub fn build(r: &Raw) -> ModelDocument {
    let mut model = StaticModel::new("M");
    let mut thimacs: Vec<ThimacId> = vec![model.root.clone()];
    for (i, (parent, tag)) in r.thimacs.iter().enumerate() {
        let parent = thimacs[parent % thimacs.len()].clone();
        let tag = match tag {
            0 => None,
            1 => Some(ThingTag::Material),
            _ => Some(ThingTag::Immaterial),
        };
        let id = model.add_thimac(&parent, &format!("T{i}"), tag);
        thimacs.push(id);
    }
    let owners = &thimacs[1..];

    let mut ids: Vec<ActionId> = Vec::new();
    if !owners.is_empty() {
        let mut has_create = BTreeSet::new();
        for (i, (owner, kind, labeled, storage)) in r.actions.iter().enumerate() {
            let owner = owners[owner % owners.len()].clone();
            let mut kind = ActionKind::ALL[*kind as usize];
            if kind == ActionKind::Create && !has_create.insert(owner.clone()) {
                kind = ActionKind::Process;
            }
            let label = labeled.then(|| format!("a{i}"));
            ids.push(model.add_action(&owner, kind, label.as_deref(), *storage));
        }
    }
    let addressable = |m: &StaticModel, a: &ActionId| m.action(a.as_str()).is_some_and(|a| a.label.is_some());

    if !ids.is_empty() {
        let mut edges = BTreeSet::new();
        for (a, b) in &r.flows {
            let (a, b) = (&ids[a % ids.len()], &ids[b % ids.len()]);
            let (x, y) = (model.action(a.as_str()).unwrap(), model.action(b.as_str()).unwrap());
            if flow_legal(x.kind, y.kind, x.owner == y.owner)
                && addressable(&model, a)
                && addressable(&model, b)
                && edges.insert((a.clone(), b.clone()))
            {
                model.add_flow(a, b);
            }
        }
        for (a, b) in &r.triggers {
            let (a, b) = (&ids[a % ids.len()], &ids[b % ids.len()]);
            if a != b && addressable(&model, a) && addressable(&model, b) && edges.insert((a.clone(), b.clone())) {
                model.add_trigger(a, b);
            }
        }
    }

    let mut doc = ModelDocument::new(model);
    let labeled: Vec<ActionId> = ids.iter().filter(|a| addressable(&doc.model, a)).cloned().collect();
    if !labeled.is_empty() {
        for (k, (start, size, desc)) in r.events.iter().enumerate() {
            let members = grow_region(&doc.model, &labeled[start % labeled.len()], *size);
            let selectors: Vec<String> = members.iter().map(|a| doc.model.action_path(a).unwrap()).collect();
            let region = extract_region(&doc.model, &selectors).expect("grown regions are connected");
            let name = format!("E{k}");
            doc.events.push(EventDef {
                id: EventId::new(name.as_str()),
                name,
                selectors,
                region,
                description: DESCRIPTIONS.get(*desc as usize).map(|s| s.to_string()),
            });
        }
    }

    let decisions: Vec<ActionId> = labeled.iter().filter(|a| doc.model.is_decision_point(a)).cloned().collect();
    let heads: Vec<ActionId> = labeled
        .iter()
        .filter(|a| matches!(doc.model.action(a.as_str()).unwrap().kind, ActionKind::Create | ActionKind::Transfer))
        .cloned()
        .collect();
    for (k, (choices, injections)) in r.scenarios.iter().enumerate() {
        let mut s = Scenario::new(&format!("s{k}"));
        if !decisions.is_empty() {
            for (d, picks) in choices {
                let d = &decisions[d % decisions.len()];
                let succ = doc.model.successors(d);
                let seq: Vec<ActionId> = picks.iter().map(|p| succ[p % succ.len()].0.clone()).collect();
                s.choices.insert(d.clone(), seq);
            }
        }
        if !heads.is_empty() {
            s.injections = injections.iter().map(|h| heads[h % heads.len()].clone()).collect();
        }
        doc.scenarios.push(s);
    }
    doc
}

/// Up to `size` labeled actions reachable from `start` along flows and
/// triggers in either direction, breadth first.
fn grow_region(model: &StaticModel, start: &ActionId, size: usize) -> BTreeSet<ActionId> {
    let mut adj: BTreeMap<&ActionId, Vec<&ActionId>> = BTreeMap::new();
    let edges = model
        .flows
        .iter()
        .map(|f| (&f.from, &f.to))
        .chain(model.triggers.iter().map(|t| (&t.from, &t.to)));
    for (a, b) in edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(a) = queue.pop_front() {
        for b in adj.get(a).into_iter().flatten() {
            if seen.len() >= size {
                return seen;
            }
            if seen.insert((*b).clone()) {
                queue.push_back(b);
            }
        }
    }
    seen
}
