//! Regions, events and chronologies.
//!
//! A region is a connected subdiagram of the static model; an event is a
//! region in time. The chronology orders events by the flows and triggers
//! that cross from one region into another.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use sha2::{Digest, Sha256};

use crate::diagnostic::{codes, Diagnostic};
use crate::metamodel::{ActionId, Element, Flow, StaticModel, Trigger};

id_newtype!(
    /// Content-derived region id: equal action sets give equal ids, so
    /// distinct events over the same subdiagram share one region.
    RegionId
);
id_newtype!(EventId);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub id: RegionId,
    pub action_ids: BTreeSet<ActionId>,
    pub induced_flows: BTreeSet<Flow>,
    pub induced_triggers: BTreeSet<Trigger>,
}

impl Region {
    pub fn contains(&self, action: &ActionId) -> bool {
        self.action_ids.contains(action)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventDef {
    pub id: EventId,
    pub name: String,
    /// Paths the region was selected with, in source order.
    pub selectors: Vec<String>,
    pub region: Region,
    pub description: Option<String>,
}

pub fn region_id(actions: &BTreeSet<ActionId>) -> RegionId {
    let mut hasher = Sha256::new();
    for a in actions {
        hasher.update(a.as_str().as_bytes());
        hasher.update(b"\n");
    }
    let digest = hasher.finalize();
    let hex: String = digest[..4].iter().map(|b| format!("{b:02x}")).collect();
    RegionId(format!("R{hex}"))
}

/// Builds the region induced by `actions`: every model edge with both ends
/// inside is kept. Fails when the set is empty or not connected.
pub fn induce_region(model: &StaticModel, actions: BTreeSet<ActionId>) -> Result<Region, Vec<Diagnostic>> {
    if actions.is_empty() {
        return Err(vec![Diagnostic::error(codes::REGION_EMPTY, "region selects no actions")]);
    }
    let induced_flows: BTreeSet<Flow> = model
        .flows
        .iter()
        .filter(|f| actions.contains(&f.from) && actions.contains(&f.to))
        .cloned()
        .collect();
    let induced_triggers: BTreeSet<Trigger> = model
        .triggers
        .iter()
        .filter(|t| actions.contains(&t.from) && actions.contains(&t.to))
        .cloned()
        .collect();

    let index: HashMap<&ActionId, usize> = actions.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mut sets = DisjointSets::new(actions.len());
    let edges = induced_flows
        .iter()
        .map(|f| (&f.from, &f.to))
        .chain(induced_triggers.iter().map(|t| (&t.from, &t.to)));
    for (a, b) in edges {
        sets.union(index[a], index[b]);
    }
    let mut components: BTreeMap<usize, Vec<&ActionId>> = BTreeMap::new();
    for (a, &i) in &index {
        components.entry(sets.find(i)).or_default().push(a);
    }
    if components.len() > 1 {
        let mut parts: Vec<String> = components
            .values()
            .map(|c| {
                let mut c: Vec<&str> = c.iter().map(|a| a.as_str()).collect();
                c.sort();
                format!("{{{}}}", c.join(", "))
            })
            .collect();
        parts.sort();
        return Err(vec![Diagnostic::error(
            codes::REGION_DISCONNECTED,
            format!("region splits into {} parts: {}", parts.len(), parts.join(" ")),
        )]);
    }

    Ok(Region {
        id: region_id(&actions),
        action_ids: actions,
        induced_flows,
        induced_triggers,
    })
}

/// Resolves element paths to actions and induces the region. A thimac path
/// selects that thimac's own actions, not those of its sub-thimacs.
pub fn extract_region<S: AsRef<str>>(model: &StaticModel, paths: &[S]) -> Result<Region, Vec<Diagnostic>> {
    let mut diagnostics = Vec::new();
    let mut actions = BTreeSet::new();
    for path in paths {
        let path = path.as_ref();
        match model.resolve_path(path) {
            Some(Element::Action(a)) => {
                actions.insert(a);
            }
            Some(Element::Thimac(t)) => actions.extend(model.actions_of(&t).map(|a| a.id.clone())),
            None => diagnostics.push(
                Diagnostic::error(codes::REF_ERROR, format!("`{path}` does not name a thimac or action")).at(path),
            ),
        }
    }
    if !diagnostics.is_empty() {
        return Err(diagnostics);
    }
    induce_region(model, actions)
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Precedence between events: a DAG of forward edges plus the edges that
/// would have closed a cycle, kept apart as repeats.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Chronology {
    pub nodes: BTreeSet<EventId>,
    pub forward_edges: BTreeSet<(EventId, EventId)>,
    pub repeat_edges: BTreeSet<(EventId, EventId)>,
}

impl Chronology {
    pub fn forward_predecessors<'a>(&'a self, event: &'a EventId) -> impl Iterator<Item = &'a EventId> + 'a {
        self.forward_edges
            .iter()
            .filter(move |(_, to)| to == event)
            .map(|(from, _)| from)
    }

    pub fn has_forward(&self, from: &str, to: &str) -> bool {
        self.forward_edges.contains(&(EventId::from(from), EventId::from(to)))
    }

    pub fn has_repeat(&self, from: &str, to: &str) -> bool {
        self.repeat_edges.contains(&(EventId::from(from), EventId::from(to)))
    }
}

/// All (E1, E2) with some flow or trigger a→b where a lies in E1's region,
/// b lies in E2's region, and b is outside E1's region.
pub fn boundary_edges(model: &StaticModel, events: &[EventDef]) -> BTreeSet<(EventId, EventId)> {
    let edges = model
        .flows
        .iter()
        .map(|f| (&f.from, &f.to))
        .chain(model.triggers.iter().map(|t| (&t.from, &t.to)));
    let mut out = BTreeSet::new();
    for (a, b) in edges {
        for source in events.iter().filter(|e| e.region.contains(a) && !e.region.contains(b)) {
            for target in events.iter().filter(|e| e.region.contains(b) && e.id != source.id) {
                out.insert((source.id.clone(), target.id.clone()));
            }
        }
    }
    out
}

/// Derives the chronology. Boundary edges are inserted in lexicographic
/// (from, to) order into an incrementally maintained topological order; an
/// edge that would close a cycle becomes a repeat edge.
pub fn derive_chronology(model: &StaticModel, events: &[EventDef]) -> Result<Chronology, Diagnostic> {
    let mut nodes = BTreeSet::new();
    for e in events {
        if !nodes.insert(e.id.clone()) {
            return Err(
                Diagnostic::error(codes::DUPLICATE_EVENT, format!("event `{}` is declared twice", e.id)).at(e.id.as_str())
            );
        }
    }
    let mut order = TopoOrder::new(&nodes);
    let mut chronology = Chronology {
        nodes,
        ..Chronology::default()
    };
    for (from, to) in boundary_edges(model, events) {
        if order.try_add(&from, &to) {
            chronology.forward_edges.insert((from, to));
        } else {
            chronology.repeat_edges.insert((from, to));
        }
    }
    Ok(chronology)
}

/// Dynamic topological order (Pearce–Kelly): only the affected window
/// between the new edge's endpoints is reordered.
struct TopoOrder {
    position: HashMap<EventId, usize>,
    succ: HashMap<EventId, Vec<EventId>>,
    pred: HashMap<EventId, Vec<EventId>>,
}

impl TopoOrder {
    fn new(nodes: &BTreeSet<EventId>) -> Self {
        TopoOrder {
            position: nodes.iter().cloned().zip(0..).collect(),
            succ: HashMap::new(),
            pred: HashMap::new(),
        }
    }

    /// Adds `from → to` unless it would create a cycle.
    fn try_add(&mut self, from: &EventId, to: &EventId) -> bool {
        if from == to {
            return false;
        }
        let upper = self.position[from];
        let lower = self.position[to];
        if lower < upper {
            let Some(forward) = self.collect(to, upper, true) else {
                return false;
            };
            let backward = self.collect(from, lower, false).unwrap_or_default();
            self.reorder(backward, forward);
        }
        self.succ.entry(from.clone()).or_default().push(to.clone());
        self.pred.entry(to.clone()).or_default().push(from.clone());
        true
    }

    /// Nodes reachable from `start` (forwards or backwards) inside the
    /// window bounded by `bound`. Forward search fails if it meets a node at
    /// exactly `bound`, which is the new edge's source.
    fn collect(&self, start: &EventId, bound: usize, forward: bool) -> Option<Vec<EventId>> {
        let mut seen = vec![start.clone()];
        let mut stack = vec![start.clone()];
        let adjacency = if forward { &self.succ } else { &self.pred };
        while let Some(n) = stack.pop() {
            for next in adjacency.get(&n).into_iter().flatten() {
                let p = self.position[next];
                if forward && p == bound {
                    return None;
                }
                let inside = if forward { p < bound } else { p > bound };
                if inside && !seen.contains(next) {
                    seen.push(next.clone());
                    stack.push(next.clone());
                }
            }
        }
        Some(seen)
    }

    fn reorder(&mut self, mut backward: Vec<EventId>, mut forward: Vec<EventId>) {
        backward.sort_by_key(|n| self.position[n]);
        forward.sort_by_key(|n| self.position[n]);
        let mut slots: Vec<usize> = backward.iter().chain(&forward).map(|n| self.position[n]).collect();
        slots.sort_unstable();
        for (node, slot) in backward.into_iter().chain(forward).zip(slots) {
            self.position.insert(node, slot);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coverage {
    pub covered: BTreeSet<ActionId>,
    pub uncovered: BTreeSet<ActionId>,
}

impl Coverage {
    /// Covered share of all actions in percent; 0 for a model without actions.
    pub fn covered_percent(&self) -> f64 {
        let total = self.covered.len() + self.uncovered.len();
        if total == 0 {
            0.0
        } else {
            100.0 * self.covered.len() as f64 / total as f64
        }
    }
}

/// Partitions the model's actions into those inside some event region and
/// the rest. A synthesized create counts as covered once any event covers
/// an action of its thimac.
pub fn coverage(model: &StaticModel, events: &[EventDef]) -> Coverage {
    let in_regions: BTreeSet<&ActionId> = events.iter().flat_map(|e| e.region.action_ids.iter()).collect();
    let mut covered = BTreeSet::new();
    let mut uncovered = BTreeSet::new();
    for action in &model.actions {
        let hit = in_regions.contains(&action.id)
            || (action.is_synthesized()
                && model
                    .actions_of(&action.owner)
                    .any(|a| a.id != action.id && in_regions.contains(&a.id)));
        if hit {
            covered.insert(action.id.clone());
        } else {
            uncovered.insert(action.id.clone());
        }
    }
    Coverage { covered, uncovered }
}
