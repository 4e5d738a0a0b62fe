//! Core thinging-machine types: thimacs, the five actions, flows, triggers,
//! and static well-formedness checks.
//!
//! A [`StaticModel`] is the timeless diagram. Every thimac hangs off a single
//! root (the model itself); actions are owned by thimacs; flows move things
//! between actions and triggers only enable.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::diagnostic::{codes, has_errors, Diagnostic};

id_newtype!(
    /// Opaque thimac identifier. Ids minted by [`StaticModel::add_thimac`] are
    /// dotted paths relative to the root; the root's id is the model name.
    ThimacId
);
id_newtype!(
    /// Opaque action identifier.
    ActionId
);

/// Label given to the Create actions synthesized by [`expand_implicit_creates`].
/// It is not a valid DSL identifier, so it can never clash with a written label.
pub const SYNTHESIZED_CREATE_LABEL: &str = "create!";

/// The five generic actions. Declaration order is the canonical serialization
/// order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ActionKind {
    Create,
    Receive,
    Process,
    Release,
    Transfer,
}

impl ActionKind {
    pub const ALL: [ActionKind; 5] = [
        ActionKind::Create,
        ActionKind::Receive,
        ActionKind::Process,
        ActionKind::Release,
        ActionKind::Transfer,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            ActionKind::Create => "create",
            ActionKind::Receive => "receive",
            ActionKind::Process => "process",
            ActionKind::Release => "release",
            ActionKind::Transfer => "transfer",
        }
    }

    pub fn from_keyword(word: &str) -> Option<ActionKind> {
        ActionKind::ALL.into_iter().find(|k| k.keyword() == word)
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Descriptive material/immaterial tag; carries no semantics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThingTag {
    Material,
    Immaterial,
}

impl ThingTag {
    pub fn keyword(self) -> &'static str {
        match self {
            ThingTag::Material => "material",
            ThingTag::Immaterial => "immaterial",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Thimac {
    pub id: ThimacId,
    pub name: String,
    pub parent: Option<ThimacId>,
    pub kind_note: Option<ThingTag>,
    /// The box implies the thimac's being; no explicit Create is drawn.
    pub implicit_create: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub id: ActionId,
    pub kind: ActionKind,
    pub owner: ThimacId,
    pub label: Option<String>,
    pub storage: bool,
}

impl Action {
    pub fn is_synthesized(&self) -> bool {
        self.kind == ActionKind::Create && self.label.as_deref() == Some(SYNTHESIZED_CREATE_LABEL)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Flow {
    pub from: ActionId,
    pub to: ActionId,
}

impl Flow {
    pub fn new(from: impl Into<ActionId>, to: impl Into<ActionId>) -> Self {
        Flow {
            from: from.into(),
            to: to.into(),
        }
    }

    pub fn key(&self) -> String {
        format!("{}->{}", self.from, self.to)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Trigger {
    pub from: ActionId,
    pub to: ActionId,
}

impl Trigger {
    pub fn new(from: impl Into<ActionId>, to: impl Into<ActionId>) -> Self {
        Trigger {
            from: from.into(),
            to: to.into(),
        }
    }

    pub fn key(&self) -> String {
        format!("{}-->{}", self.from, self.to)
    }
}

impl From<String> for ActionId {
    fn from(s: String) -> Self {
        ActionId(s)
    }
}

impl From<&ActionId> for ActionId {
    fn from(id: &ActionId) -> Self {
        id.clone()
    }
}

/// An element addressed by a dotted path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Element {
    Thimac(ThimacId),
    Action(ActionId),
}

/// How an action reaches one of its successors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    Flow,
    Trigger,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticModel {
    pub root: ThimacId,
    pub thimacs: Vec<Thimac>,
    pub actions: Vec<Action>,
    pub flows: Vec<Flow>,
    pub triggers: Vec<Trigger>,
}

impl StaticModel {
    /// A model holding only its root thimac.
    pub fn new(name: &str) -> Self {
        let root = ThimacId::new(name);
        StaticModel {
            thimacs: vec![Thimac {
                id: root.clone(),
                name: name.to_owned(),
                parent: None,
                kind_note: None,
                implicit_create: true,
            }],
            root,
            actions: Vec::new(),
            flows: Vec::new(),
            triggers: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        self.root.as_str()
    }

    pub fn add_thimac(&mut self, parent: &ThimacId, name: &str, tag: Option<ThingTag>) -> ThimacId {
        let id = if *parent == self.root {
            ThimacId::new(name)
        } else {
            ThimacId::new(format!("{parent}.{name}"))
        };
        self.thimacs.push(Thimac {
            id: id.clone(),
            name: name.to_owned(),
            parent: Some(parent.clone()),
            kind_note: tag,
            implicit_create: true,
        });
        id
    }

    /// Adds an action and mints its id: `owner.label`, or `owner.#kindN` for
    /// the N-th unlabeled action of that kind.
    pub fn add_action(
        &mut self,
        owner: &ThimacId,
        kind: ActionKind,
        label: Option<&str>,
        storage: bool,
    ) -> ActionId {
        let id = match label {
            Some(label) => ActionId::new(format!("{owner}.{label}")),
            None => {
                let n = self
                    .actions
                    .iter()
                    .filter(|a| a.owner == *owner && a.kind == kind && a.label.is_none())
                    .count();
                ActionId::new(format!("{owner}.#{kind}{}", n + 1))
            }
        };
        if kind == ActionKind::Create {
            if let Some(t) = self.thimacs.iter_mut().find(|t| t.id == *owner) {
                t.implicit_create = false;
            }
        }
        self.actions.push(Action {
            id: id.clone(),
            kind,
            owner: owner.clone(),
            label: label.map(str::to_owned),
            storage,
        });
        id
    }

    pub fn add_flow(&mut self, from: &ActionId, to: &ActionId) {
        self.flows.push(Flow::new(from, to));
    }

    pub fn add_trigger(&mut self, from: &ActionId, to: &ActionId) {
        self.triggers.push(Trigger::new(from, to));
    }

    pub fn thimac(&self, id: &str) -> Option<&Thimac> {
        self.thimacs.iter().find(|t| t.id.as_str() == id)
    }

    pub fn action(&self, id: &str) -> Option<&Action> {
        self.actions.iter().find(|a| a.id.as_str() == id)
    }

    pub fn children(&self, id: &ThimacId) -> impl Iterator<Item = &Thimac> + '_ {
        let id = id.clone();
        self.thimacs.iter().filter(move |t| t.parent.as_ref() == Some(&id))
    }

    pub fn actions_of(&self, id: &ThimacId) -> impl Iterator<Item = &Action> + '_ {
        let id = id.clone();
        self.actions.iter().filter(move |a| a.owner == id)
    }

    /// Outgoing flows and triggers of `action`, as (target, edge kind).
    pub fn successors(&self, action: &ActionId) -> Vec<(ActionId, EdgeKind)> {
        let flows = self
            .flows
            .iter()
            .filter(|f| f.from == *action)
            .map(|f| (f.to.clone(), EdgeKind::Flow));
        let triggers = self
            .triggers
            .iter()
            .filter(|t| t.from == *action)
            .map(|t| (t.to.clone(), EdgeKind::Trigger));
        flows.chain(triggers).collect()
    }

    /// A Process action with two or more outgoing flows/triggers: which one
    /// is taken is decided by the world, i.e. by a scenario.
    pub fn is_decision_point(&self, action: &ActionId) -> bool {
        self.action(action.as_str())
            .is_some_and(|a| a.kind == ActionKind::Process)
            && self.successors(action).len() >= 2
    }

    /// Resolves `Child.Sub.label` from the root. A final segment naming both
    /// a sub-thimac and an action resolves to the thimac.
    pub fn resolve_path(&self, path: &str) -> Option<Element> {
        let segments: Vec<&str> = path.split('.').collect();
        let (last, parents) = segments.split_last()?;
        let mut current = self.root.clone();
        for seg in parents {
            current = self.children(&current).find(|t| t.name == *seg)?.id.clone();
        }
        if let Some(t) = self.children(&current).find(|t| t.name == *last) {
            return Some(Element::Thimac(t.id.clone()));
        }
        self.actions_of(&current)
            .find(|a| a.label.as_deref() == Some(*last))
            .map(|a| Element::Action(a.id.clone()))
    }

    /// Dotted path of a thimac relative to the root (empty for the root).
    pub fn thimac_path(&self, id: &ThimacId) -> Option<String> {
        let mut names = Vec::new();
        let mut current = self.thimac(id.as_str())?;
        let mut guard = 0;
        while current.id != self.root {
            names.push(current.name.clone());
            current = self.thimac(current.parent.as_ref()?.as_str())?;
            guard += 1;
            if guard > self.thimacs.len() {
                return None;
            }
        }
        names.reverse();
        Some(names.join("."))
    }

    /// Dotted path of a labeled action, `None` for unaddressable actions.
    pub fn action_path(&self, id: &ActionId) -> Option<String> {
        let action = self.action(id.as_str())?;
        let label = action.label.as_ref()?;
        let owner = self.thimac_path(&action.owner)?;
        if owner.is_empty() {
            Some(label.clone())
        } else {
            Some(format!("{owner}.{label}"))
        }
    }
}

/// Flow-legality matrix. Inside one thimac a thing moves
/// Transfer→Receive→{Process,Release}, Process→Release, Create→{Process,Release}
/// and Release→Transfer; between thimacs only Transfer→Transfer.
pub fn flow_legal(from: ActionKind, to: ActionKind, same_thimac: bool) -> bool {
    use ActionKind::*;
    if same_thimac {
        matches!(
            (from, to),
            (Transfer, Receive)
                | (Receive, Process)
                | (Receive, Release)
                | (Process, Release)
                | (Create, Process)
                | (Create, Release)
                | (Release, Transfer)
        )
    } else {
        matches!((from, to), (Transfer, Transfer))
    }
}

/// Checks every structural invariant of the model. An empty list means the
/// model is valid; warnings never block later stages.
pub fn validate_static(model: &StaticModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    check_thimacs(model, &mut out);
    check_actions(model, &mut out);
    check_edges(model, &mut out);
    out
}

fn check_thimacs(model: &StaticModel, out: &mut Vec<Diagnostic>) {
    let mut seen = HashSet::new();
    for t in &model.thimacs {
        if !seen.insert(&t.id) {
            out.push(
                Diagnostic::error(codes::DUPLICATE_ID, format!("thimac id `{}` is declared twice", t.id))
                    .at(t.id.as_str()),
            );
        }
    }
    let by_id: HashMap<&ThimacId, &Thimac> = model.thimacs.iter().map(|t| (&t.id, t)).collect();

    match by_id.get(&model.root) {
        None => out.push(Diagnostic::error(
            codes::UNKNOWN_ROOT,
            format!("root thimac `{}` is not declared", model.root),
        )),
        Some(root) if root.parent.is_some() => out.push(
            Diagnostic::error(codes::CONTAINMENT_CYCLE, "the root thimac must not have a parent")
                .at(root.id.as_str()),
        ),
        Some(_) => {}
    }

    for t in &model.thimacs {
        if t.id == model.root {
            continue;
        }
        let Some(parent) = &t.parent else {
            out.push(
                Diagnostic::error(
                    codes::DETACHED_THIMAC,
                    format!("thimac `{}` has no parent and is not the root", t.id),
                )
                .at(t.id.as_str()),
            );
            continue;
        };
        if !by_id.contains_key(parent) {
            out.push(
                Diagnostic::error(
                    codes::UNKNOWN_PARENT,
                    format!("thimac `{}` names unknown parent `{parent}`", t.id),
                )
                .at(t.id.as_str()),
            );
            continue;
        }
        // Walk to the root; revisiting a node means a containment cycle.
        let mut visited = HashSet::new();
        let mut cursor = Some(&t.id);
        while let Some(id) = cursor {
            if *id == model.root {
                break;
            }
            if !visited.insert(id) {
                out.push(
                    Diagnostic::error(
                        codes::CONTAINMENT_CYCLE,
                        format!("thimac `{}` is contained in itself", t.id),
                    )
                    .at(t.id.as_str()),
                );
                break;
            }
            cursor = by_id.get(id).and_then(|x| x.parent.as_ref());
        }
    }

    let mut names: BTreeMap<(&ThimacId, &str), usize> = BTreeMap::new();
    for t in &model.thimacs {
        if let Some(parent) = &t.parent {
            let n = names.entry((parent, t.name.as_str())).or_default();
            *n += 1;
            if *n == 2 {
                out.push(
                    Diagnostic::error(
                        codes::DUPLICATE_NAME,
                        format!("`{parent}` has two sub-thimacs named `{}`", t.name),
                    )
                    .at(t.id.as_str()),
                );
            }
        }
    }
}

fn check_actions(model: &StaticModel, out: &mut Vec<Diagnostic>) {
    let mut seen = HashSet::new();
    let mut creates: HashMap<&ThimacId, usize> = HashMap::new();
    let mut labels: HashSet<(&ThimacId, &str)> = HashSet::new();

    for a in &model.actions {
        if !seen.insert(&a.id) {
            out.push(
                Diagnostic::error(codes::DUPLICATE_ID, format!("action id `{}` is declared twice", a.id))
                    .at(a.id.as_str()),
            );
        }
        let Some(owner) = model.thimac(a.owner.as_str()) else {
            out.push(
                Diagnostic::error(
                    codes::UNKNOWN_OWNER,
                    format!("action `{}` is owned by unknown thimac `{}`", a.id, a.owner),
                )
                .at(a.id.as_str()),
            );
            continue;
        };
        if a.kind == ActionKind::Create {
            let n = creates.entry(&a.owner).or_default();
            *n += 1;
            if *n == 2 {
                out.push(
                    Diagnostic::error(
                        codes::MULTIPLE_CREATE,
                        format!("thimac `{}` has more than one create action", a.owner),
                    )
                    .at(a.id.as_str()),
                );
            }
            if owner.implicit_create && !a.is_synthesized() {
                out.push(
                    Diagnostic::error(
                        codes::IMPLICIT_CREATE_CONFLICT,
                        format!(
                            "thimac `{}` is marked implicit-create but owns create `{}`",
                            a.owner, a.id
                        ),
                    )
                    .at(a.id.as_str()),
                );
            }
        }
        if let Some(label) = &a.label {
            if !labels.insert((&a.owner, label.as_str())) {
                out.push(
                    Diagnostic::error(
                        codes::DUPLICATE_NAME,
                        format!("label `{label}` is used twice inside `{}`", a.owner),
                    )
                    .at(a.id.as_str()),
                );
            }
            if model.children(&a.owner).any(|t| t.name == *label) {
                out.push(
                    Diagnostic::error(
                        codes::DUPLICATE_NAME,
                        format!("label `{label}` clashes with a sub-thimac of `{}`", a.owner),
                    )
                    .at(a.id.as_str()),
                );
            }
        }
    }
}

fn check_edges(model: &StaticModel, out: &mut Vec<Diagnostic>) {
    let actions: HashMap<&ActionId, &Action> = model.actions.iter().map(|a| (&a.id, a)).collect();
    let mut touched: HashSet<&ActionId> = HashSet::new();

    let missing = |id: &ActionId, key: &str, out: &mut Vec<Diagnostic>| {
        if actions.contains_key(id) {
            false
        } else {
            out.push(
                Diagnostic::error(codes::UNKNOWN_ACTION, format!("edge endpoint `{id}` is not an action"))
                    .at(key),
            );
            true
        }
    };

    let mut flow_set = HashSet::new();
    for f in &model.flows {
        let key = f.key();
        let bad_from = missing(&f.from, &key, out);
        let bad_to = missing(&f.to, &key, out);
        if !flow_set.insert((&f.from, &f.to)) {
            out.push(Diagnostic::error(codes::DUPLICATE_FLOW, format!("flow {key} is declared twice")).at(&key));
        }
        if bad_from || bad_to {
            continue;
        }
        touched.insert(&f.from);
        touched.insert(&f.to);
        let (a, b) = (actions[&f.from], actions[&f.to]);
        if !flow_legal(a.kind, b.kind, a.owner == b.owner) {
            let place = if a.owner == b.owner { "inside one thimac" } else { "across thimacs" };
            out.push(
                Diagnostic::error(
                    codes::FLOW_ILLEGAL,
                    format!("a thing cannot flow from {} to {} {place}", a.kind, b.kind),
                )
                .at(&key),
            );
        }
    }

    let mut trigger_set = HashSet::new();
    for t in &model.triggers {
        let key = t.key();
        let bad_from = missing(&t.from, &key, out);
        let bad_to = missing(&t.to, &key, out);
        if t.from == t.to {
            out.push(Diagnostic::error(codes::TRIGGER_SELF, format!("trigger {key} points at itself")).at(&key));
        }
        if !trigger_set.insert((&t.from, &t.to)) {
            out.push(
                Diagnostic::error(codes::DUPLICATE_TRIGGER, format!("trigger {key} is declared twice")).at(&key),
            );
        }
        if flow_set.contains(&(&t.from, &t.to)) {
            out.push(
                Diagnostic::error(
                    codes::TRIGGER_DUPLICATES_FLOW,
                    format!("trigger {key} duplicates a flow between the same actions"),
                )
                .at(&key),
            );
        }
        if !bad_from {
            touched.insert(&t.from);
        }
        if !bad_to {
            touched.insert(&t.to);
        }
    }

    for a in &model.actions {
        if touched.contains(&a.id) {
            continue;
        }
        let d = if a.kind == ActionKind::Transfer {
            Diagnostic::warning(
                codes::DANGLING_TRANSFER,
                format!("transfer `{}` has neither incoming nor outgoing edges", a.id),
            )
        } else {
            Diagnostic::warning(codes::ORPHAN_ACTION, format!("action `{}` is not connected", a.id))
        };
        out.push(d.at(a.id.as_str()));
    }
}

/// Gives every implicit-create thimac a synthesized Create action
/// (label `create!`, no edges). Idempotent; the input is left untouched.
pub fn expand_implicit_creates(model: &StaticModel) -> Result<StaticModel, Vec<Diagnostic>> {
    let diagnostics = validate_static(model);
    if has_errors(&diagnostics) {
        return Err(diagnostics.into_iter().filter(Diagnostic::is_error).collect());
    }
    let mut expanded = model.clone();
    let has_create: BTreeSet<&ThimacId> = model
        .actions
        .iter()
        .filter(|a| a.kind == ActionKind::Create)
        .map(|a| &a.owner)
        .collect();
    for t in model.thimacs.iter().filter(|t| t.implicit_create) {
        if has_create.contains(&t.id) {
            continue;
        }
        expanded.actions.push(Action {
            id: ActionId::new(format!("{}.{SYNTHESIZED_CREATE_LABEL}", t.id)),
            kind: ActionKind::Create,
            owner: t.id.clone(),
            label: Some(SYNTHESIZED_CREATE_LABEL.to_owned()),
            storage: false,
        });
    }
    Ok(expanded)
}
