//! Deterministic simulation of the dynamic model.
//!
//! Things move through actions when the event whose region holds them fires.
//! One event fires per tick: the enabled event with the smallest id. While it
//! fires its region is in [`Mode::Existence`]; otherwise every region
//! subsists. The first firing over a region registers it for good, and each
//! firing leaves an [`InformationRecord`] behind.
//!
//! Routing rules, in brief:
//! * a non-Create trigger target is *gated*: things flow into it only with a
//!   permit, which a trigger firing grants (or spends at once on the oldest
//!   thing parked for it);
//! * a blocked thing parks in the storage of its current action, else of the
//!   gated target, else it is stuck;
//! * a trigger into a Create manifests a new thing there;
//! * at a decision point the scenario picks one successor;
//! * a Transfer passes things inward when they come from outside its thimac
//!   and outward when they come from inside.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt::Write;

use thiserror::Error;

use crate::diagnostic::{codes, has_errors, Diagnostic};
use crate::dsl::ModelDocument;
use crate::events::{derive_chronology, Chronology, EventDef, EventId, Region, RegionId};
use crate::metamodel::{validate_static, ActionId, ActionKind, EdgeKind, StaticModel, ThimacId};

/// Default number of steps [`Simulator::run`] may take.
pub const DEFAULT_BUDGET: usize = 10_000;

/// Default cap on the number of things a run may create. Trigger fan-out
/// can grow the population geometrically, which a step budget alone does
/// not bound.
pub const DEFAULT_THING_LIMIT: usize = 100_000;

/// World decisions for one run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Scenario {
    pub id: String,
    /// Decision point → successors to take on its 1st, 2nd, ... visit. The
    /// last entry applies to every later visit.
    pub choices: BTreeMap<ActionId, Vec<ActionId>>,
    /// Where things enter, in order.
    pub injections: Vec<ActionId>,
}

impl Scenario {
    pub fn new(id: &str) -> Self {
        Scenario {
            id: id.to_owned(),
            ..Scenario::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Existence,
    Subsistence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence {
    pub event_id: EventId,
    pub region_id: RegionId,
    pub start_tick: u64,
    pub end_tick: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InformationRecord {
    pub id: String,
    pub event_id: EventId,
    pub region_id: RegionId,
    pub tick: u64,
    /// `None` while the record merely subsists.
    pub carrier: Option<ThimacId>,
}

/// Where a thing is.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Place {
    /// Waiting to be handled by an event covering `at`.
    Pending { at: ActionId, from: Option<ActionId> },
    /// In the storage of `storage` until one of `waiting_for` is triggered.
    Parked {
        storage: ActionId,
        waiting_for: Vec<ActionId>,
        from: ActionId,
        seq: u64,
    },
    /// Reached an action without outgoing flows.
    Resting { at: ActionId },
    /// Blocked with no storage to wait in.
    Stuck { at: ActionId },
}

impl Place {
    /// The action the thing sits at (the storage owner when parked).
    pub fn action(&self) -> &ActionId {
        match self {
            Place::Pending { at, .. } | Place::Resting { at } | Place::Stuck { at } => at,
            Place::Parked { storage, .. } => storage,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Thing {
    pub id: String,
    pub place: Place,
    /// Record id of the information this thing carries.
    pub tag: Option<String>,
    /// Move counter value of the last move; orders carrier updates.
    last_moved: u64,
}

/// One change of carrier for a carried record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarrierHop {
    pub record: String,
    pub carrier: ThimacId,
    pub tick: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub clock: u64,
    pub modes: BTreeMap<RegionId, Mode>,
    /// Registered regions with their first-occurrence tick, in registration order.
    pub registry: Vec<(RegionId, u64)>,
    pub things: Vec<Thing>,
    pub trace: Vec<Occurrence>,
    /// Subsisting footprints, one per occurrence. Never removed.
    pub footprints: Vec<InformationRecord>,
    /// Records currently carried on a thimac.
    pub carried: Vec<InformationRecord>,
    pub hops: Vec<CarrierHop>,
    pub permits: BTreeMap<ActionId, usize>,
    pub warnings: Vec<Diagnostic>,
    visits: BTreeMap<ActionId, usize>,
    seq: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Fired(Occurrence),
    Done,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("no scenario choice for reachable decision point(s): {}", join(.0))]
    MissingChoice(Vec<ActionId>),
    #[error("document cannot be simulated: {0}")]
    InvalidDocument(String),
    #[error("unknown region `{0}`")]
    UnknownRegion(RegionId),
    #[error("unknown information record `{0}`")]
    UnknownRecord(String),
    #[error("information record `{0}` is already carried")]
    AlreadyCarried(String),
    #[error("`{0}` is not a thimac with a create or entry transfer")]
    UnknownCarrier(String),
    #[error("step budget of {0} exhausted")]
    Budget(usize),
    #[error("thing limit of {0} exceeded")]
    ThingLimit(usize),
}

fn join(ids: &[ActionId]) -> String {
    ids.iter().map(ActionId::as_str).collect::<Vec<_>>().join(", ")
}

impl SimError {
    pub fn code(&self) -> &'static str {
        match self {
            SimError::UnknownScenario(_) => codes::UNKNOWN_SCENARIO,
            SimError::MissingChoice(_) => codes::MISSING_CHOICE,
            SimError::InvalidDocument(_) => codes::INVALID_DOCUMENT,
            SimError::UnknownRegion(_) => "UNKNOWN_REGION",
            SimError::UnknownRecord(_) => "UNKNOWN_RECORD",
            SimError::AlreadyCarried(_) => "ALREADY_CARRIED",
            SimError::UnknownCarrier(_) => "UNKNOWN_CARRIER",
            SimError::Budget(_) | SimError::ThingLimit(_) => codes::BUDGET,
        }
    }

    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic::error(self.code(), self.to_string())
    }
}

pub struct Simulator<'d> {
    doc: &'d ModelDocument,
    scenario: Scenario,
    chronology: Chronology,
    /// Events sorted by id.
    events: Vec<&'d EventDef>,
    gated: BTreeSet<ActionId>,
    budget: usize,
    thing_limit: usize,
    state: SimState,
}

impl<'d> Simulator<'d> {
    /// Places one thing at each injection head of `scenario_id`.
    pub fn new(doc: &'d ModelDocument, scenario_id: &str) -> Result<Self, SimError> {
        let scenario = doc
            .scenario(scenario_id)
            .cloned()
            .ok_or_else(|| SimError::UnknownScenario(scenario_id.to_owned()))?;
        Simulator::with_scenario(doc, scenario)
    }

    /// Like [`Simulator::new`] with a scenario that need not be part of `doc`.
    pub fn with_scenario(doc: &'d ModelDocument, scenario: Scenario) -> Result<Self, SimError> {
        let model = &doc.model;
        let diagnostics = validate_static(model);
        if has_errors(&diagnostics) {
            let first = diagnostics.iter().find(|d| d.is_error()).expect("has errors");
            return Err(SimError::InvalidDocument(first.to_string()));
        }
        let chronology = derive_chronology(model, &doc.events).map_err(|d| SimError::InvalidDocument(d.to_string()))?;
        for head in &scenario.injections {
            if model.action(head.as_str()).is_none() {
                return Err(SimError::InvalidDocument(format!("injection head `{head}` is not an action")));
            }
        }
        let missing = missing_choices(model, &scenario);
        if !missing.is_empty() {
            return Err(SimError::MissingChoice(missing));
        }

        let mut events: Vec<&EventDef> = doc.events.iter().collect();
        events.sort_by(|a, b| a.id.cmp(&b.id));
        let gated = model
            .triggers
            .iter()
            .filter(|t| model.action(t.to.as_str()).is_some_and(|a| a.kind != ActionKind::Create))
            .map(|t| t.to.clone())
            .collect();
        let modes = events
            .iter()
            .map(|e| (e.region.id.clone(), Mode::Subsistence))
            .collect();
        let mut state = SimState {
            clock: 0,
            modes,
            registry: Vec::new(),
            things: Vec::new(),
            trace: Vec::new(),
            footprints: Vec::new(),
            carried: Vec::new(),
            hops: Vec::new(),
            permits: BTreeMap::new(),
            warnings: Vec::new(),
            visits: BTreeMap::new(),
            seq: 0,
        };
        for head in &scenario.injections {
            spawn(&mut state, head.clone(), None);
        }
        Ok(Simulator {
            doc,
            scenario,
            chronology,
            events,
            gated,
            budget: DEFAULT_BUDGET,
            thing_limit: DEFAULT_THING_LIMIT,
            state,
        })
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_thing_limit(mut self, limit: usize) -> Self {
        self.thing_limit = limit;
        self
    }

    /// True once the run has created more things than its limit allows.
    pub fn over_thing_limit(&self) -> bool {
        self.state.things.len() > self.thing_limit
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn chronology(&self) -> &Chronology {
        &self.chronology
    }

    pub fn trace(&self) -> &[Occurrence] {
        &self.state.trace
    }

    pub fn region_of(&self, event_id: &str) -> Option<&RegionId> {
        self.doc.event(event_id).map(|e| &e.region.id)
    }

    pub fn mode_of(&self, region: &RegionId) -> Result<Mode, SimError> {
        self.state
            .modes
            .get(region)
            .copied()
            .ok_or_else(|| SimError::UnknownRegion(region.clone()))
    }

    /// True while no occurrence over `region` has happened: the region has
    /// only ever subsisted.
    pub fn is_negative(&self, region: &RegionId) -> Result<bool, SimError> {
        self.mode_of(region)?;
        Ok(!self.state.registry.iter().any(|(r, _)| r == region))
    }

    /// Fires the next enabled event, if any.
    pub fn step(&mut self) -> Step {
        self.step_observed(|_| {})
    }

    /// Like [`Simulator::step`], calling `observe` while the firing region
    /// is still in existence.
    pub fn step_observed(&mut self, observe: impl FnOnce(&Simulator<'d>)) -> Step {
        let Some(event) = self.next_enabled() else {
            self.report_unhandled();
            return Step::Done;
        };
        Step::Fired(self.fire(event, observe))
    }

    /// Steps until done. Exceeding the step budget or the thing limit is an
    /// error; the state reached so far stays available.
    pub fn run(&mut self) -> Result<&SimState, SimError> {
        for _ in 0..self.budget {
            if self.step() == Step::Done {
                return Ok(&self.state);
            }
            if self.over_thing_limit() {
                return Err(SimError::ThingLimit(self.thing_limit));
            }
        }
        if self.next_enabled().is_some() {
            return Err(SimError::Budget(self.budget));
        }
        self.report_unhandled();
        Ok(&self.state)
    }

    /// Puts a subsisting record onto `carrier`: a thing tagged with the
    /// record enters at the carrier's create (or entry transfer) and later
    /// firings carry it on. The subsisting footprint stays registered.
    pub fn carry(&mut self, record_id: &str, carrier: &str) -> Result<InformationRecord, SimError> {
        let record = self
            .state
            .footprints
            .iter()
            .find(|r| r.id == record_id)
            .cloned()
            .ok_or_else(|| SimError::UnknownRecord(record_id.to_owned()))?;
        if self.state.carried.iter().any(|r| r.id == record_id) {
            return Err(SimError::AlreadyCarried(record_id.to_owned()));
        }
        let model = &self.doc.model;
        let thimac = model
            .thimac(carrier)
            .filter(|t| t.id != model.root)
            .ok_or_else(|| SimError::UnknownCarrier(carrier.to_owned()))?;
        let entry = entry_action(model, &thimac.id).ok_or_else(|| SimError::UnknownCarrier(carrier.to_owned()))?;
        spawn(&mut self.state, entry, Some(record_id.to_owned()));
        let carried = InformationRecord {
            carrier: Some(thimac.id.clone()),
            ..record
        };
        self.state.hops.push(CarrierHop {
            record: record_id.to_owned(),
            carrier: thimac.id.clone(),
            tick: self.state.clock,
        });
        self.state.carried.push(carried.clone());
        Ok(carried)
    }

    /// Carriers `record` has had, oldest first.
    pub fn carrier_history(&self, record: &str) -> Vec<&ThimacId> {
        self.state
            .hops
            .iter()
            .filter(|h| h.record == record)
            .map(|h| &h.carrier)
            .collect()
    }

    /// The run in line format: each occurrence followed by its footprint,
    /// then the currently carried records.
    pub fn trace_text(&self) -> String {
        let mut out = String::new();
        for (occ, info) in self.state.trace.iter().zip(&self.state.footprints) {
            writeln!(out, "tick={} event={} region={}", occ.end_tick, occ.event_id, occ.region_id).unwrap();
            write_record(&mut out, info);
        }
        for info in &self.state.carried {
            write_record(&mut out, info);
        }
        out
    }

    fn pending_actions(&self) -> BTreeSet<&ActionId> {
        self.state
            .things
            .iter()
            .filter_map(|t| match &t.place {
                Place::Pending { at, .. } => Some(at),
                _ => None,
            })
            .collect()
    }

    fn next_enabled(&self) -> Option<&'d EventDef> {
        let pending = self.pending_actions();
        let holds = |e: &EventDef| e.region.action_ids.iter().any(|a| pending.contains(a));
        let by_id: BTreeMap<&EventId, &EventDef> = self.events.iter().map(|e| (&e.id, *e)).collect();
        self.events.iter().copied().find(|e| {
            holds(e)
                && !self
                    .chronology
                    .forward_predecessors(&e.id)
                    .any(|p| by_id.get(p).is_some_and(|p| holds(p)))
        })
    }

    fn fire(&mut self, event: &'d EventDef, observe: impl FnOnce(&Simulator<'d>)) -> Occurrence {
        let region = &event.region;
        self.state.clock += 1;
        let tick = self.state.clock;
        self.state.modes.insert(region.id.clone(), Mode::Existence);

        let queue: VecDeque<usize> = self
            .state
            .things
            .iter()
            .enumerate()
            .filter(|(_, t)| matches!(&t.place, Place::Pending { at, .. } if region.contains(at)))
            .map(|(i, _)| i)
            .collect();
        let mut pass = Pass {
            queue,
            visited: HashSet::new(),
            reached: HashSet::new(),
        };
        while let Some(i) = pass.queue.pop_front() {
            self.advance(i, region, &mut pass);
        }

        observe(self);

        self.state.modes.insert(region.id.clone(), Mode::Subsistence);
        if !self.state.registry.iter().any(|(r, _)| *r == region.id) {
            self.state.registry.push((region.id.clone(), tick));
        }
        let occurrence = Occurrence {
            event_id: event.id.clone(),
            region_id: region.id.clone(),
            start_tick: tick,
            end_tick: tick,
        };
        self.state.trace.push(occurrence.clone());
        let n = self.state.footprints.len() + 1;
        self.state.footprints.push(InformationRecord {
            id: format!("I{n}"),
            event_id: event.id.clone(),
            region_id: region.id.clone(),
            tick,
            carrier: None,
        });
        self.update_carriers();
        occurrence
    }

    /// Moves thing `i` through `region` until it leaves, rests, parks or
    /// revisits an action (then it stays pending and the event repeats).
    fn advance(&mut self, i: usize, region: &Region, pass: &mut Pass) {
        let doc = self.doc;
        let model = &doc.model;
        loop {
            let Place::Pending { at, from } = self.state.things[i].place.clone() else {
                return;
            };
            if !region.contains(&at) || !pass.visited.insert((i, at.clone())) {
                return;
            }
            pass.reached.insert(at.clone());
            let (triggers, flows) = if model.is_decision_point(&at) {
                let Some((succ, kind)) = self.choose(&at) else {
                    self.stuck(i, at, "the scenario makes no choice here");
                    return;
                };
                match kind {
                    EdgeKind::Trigger => (vec![succ], vec![]),
                    EdgeKind::Flow => (vec![], vec![succ]),
                }
            } else {
                (trigger_targets(model, &at), flow_targets(model, &at, from.as_ref()))
            };

            for target in triggers {
                self.fire_trigger(i, target, region, pass);
            }
            if flows.is_empty() {
                self.state.things[i].place = Place::Resting { at };
                return;
            }
            let open = flows
                .iter()
                .find(|b| !self.gated.contains(*b) || self.state.permits.get(*b).is_some_and(|n| *n > 0));
            match open.cloned() {
                Some(next) => {
                    if let Some(n) = self.state.permits.get_mut(&next) {
                        *n -= 1;
                        if *n == 0 {
                            self.state.permits.remove(&next);
                        }
                    }
                    self.move_to(i, next, Some(at));
                }
                None => {
                    self.park(i, at, flows);
                    return;
                }
            }
        }
    }

    /// The successor the scenario picks at decision point `at` on this visit.
    fn choose(&mut self, at: &ActionId) -> Option<(ActionId, EdgeKind)> {
        let picks = self.scenario.choices.get(at)?;
        let visit = self.state.visits.entry(at.clone()).or_default();
        let pick = picks.get(*visit).or(picks.last())?.clone();
        *visit += 1;
        self.doc
            .model
            .successors(at)
            .into_iter()
            .find(|(s, _)| *s == pick)
    }

    fn fire_trigger(&mut self, source: usize, target: ActionId, region: &Region, pass: &mut Pass) {
        let is_create = self
            .doc
            .model
            .action(target.as_str())
            .is_some_and(|a| a.kind == ActionKind::Create);
        if is_create {
            let tag = self.state.things[source].tag.clone();
            let j = spawn(&mut self.state, target.clone(), tag);
            // A create reached again in this firing is a revisit: the new
            // thing waits for a later firing, so trigger cycles cost steps.
            if region.contains(&target) && !pass.reached.contains(&target) {
                pass.queue.push_back(j);
            }
            return;
        }
        let parked = self
            .state
            .things
            .iter()
            .enumerate()
            .filter_map(|(j, t)| match &t.place {
                Place::Parked {
                    waiting_for, from, seq, ..
                } if waiting_for.contains(&target) => Some((*seq, j, from.clone())),
                _ => None,
            })
            .min();
        match parked {
            Some((_, j, from)) => {
                self.move_to(j, target.clone(), Some(from));
                if region.contains(&target) {
                    pass.queue.push_back(j);
                }
            }
            None => *self.state.permits.entry(target).or_default() += 1,
        }
    }

    fn move_to(&mut self, i: usize, at: ActionId, from: Option<ActionId>) {
        self.state.seq += 1;
        let thing = &mut self.state.things[i];
        thing.place = Place::Pending { at, from };
        thing.last_moved = self.state.seq;
    }

    /// Parks thing `i`, blocked at `at` until one of the gated `blocked`
    /// successors is triggered.
    fn park(&mut self, i: usize, at: ActionId, blocked: Vec<ActionId>) {
        let doc = self.doc;
        let model = &doc.model;
        let has_storage = |a: &ActionId| model.action(a.as_str()).is_some_and(|a| a.storage);
        let storage = if has_storage(&at) {
            at.clone()
        } else if let Some(b) = blocked.iter().find(|b| has_storage(b)) {
            b.clone()
        } else {
            self.stuck(i, at, &format!("`{}` is not enabled and there is no storage", join(&blocked)));
            return;
        };
        self.state.seq += 1;
        let thing = &mut self.state.things[i];
        thing.place = Place::Parked {
            storage,
            waiting_for: blocked,
            from: at,
            seq: self.state.seq,
        };
        thing.last_moved = self.state.seq;
    }

    fn stuck(&mut self, i: usize, at: ActionId, why: &str) {
        let id = self.state.things[i].id.clone();
        self.state.warnings.push(
            Diagnostic::warning(codes::STUCK_THING, format!("thing {id} is stuck at `{at}`: {why}")).at(at.as_str()),
        );
        self.state.things[i].place = Place::Stuck { at };
    }

    /// Pending things that no event covers can never move; say so once.
    fn report_unhandled(&mut self) {
        for t in &self.state.things {
            if let Place::Pending { at, .. } = &t.place {
                let message = format!("thing {} is stuck at `{at}`: no event covers it", t.id);
                if !self.state.warnings.iter().any(|w| w.message == message) {
                    self.state
                        .warnings
                        .push(Diagnostic::warning(codes::STUCK_THING, message).at(at.as_str()));
                }
            }
        }
    }

    /// A carried record rides on the thimac where its most recently moved
    /// tagged thing is.
    fn update_carriers(&mut self) {
        let model = &self.doc.model;
        for k in 0..self.state.carried.len() {
            let record = self.state.carried[k].id.clone();
            let latest = self
                .state
                .things
                .iter()
                .filter(|t| t.tag.as_deref() == Some(record.as_str()))
                .max_by_key(|t| t.last_moved);
            let Some(owner) = latest.and_then(|t| model.action(t.place.action().as_str())).map(|a| a.owner.clone())
            else {
                continue;
            };
            if self.state.carried[k].carrier.as_ref() != Some(&owner) {
                self.state.carried[k].carrier = Some(owner.clone());
                self.state.hops.push(CarrierHop {
                    record,
                    carrier: owner,
                    tick: self.state.clock,
                });
            }
        }
    }
}

/// Work list of one firing.
struct Pass {
    queue: VecDeque<usize>,
    /// (thing, action) pairs handled so far.
    visited: HashSet<(usize, ActionId)>,
    /// Actions any thing has been handled at.
    reached: HashSet<ActionId>,
}

fn write_record(out: &mut String, info: &InformationRecord) {
    let carrier = info.carrier.as_ref().map_or("-", ThimacId::as_str);
    writeln!(
        out,
        "info={} event={} tick={} carrier={carrier}",
        info.id, info.event_id, info.tick
    )
    .unwrap();
}

fn spawn(state: &mut SimState, at: ActionId, tag: Option<String>) -> usize {
    state.seq += 1;
    let n = state.things.len();
    state.things.push(Thing {
        id: format!("T{}", n + 1),
        place: Place::Pending { at, from: None },
        tag,
        last_moved: state.seq,
    });
    n
}

fn trigger_targets(model: &StaticModel, at: &ActionId) -> Vec<ActionId> {
    let mut out: Vec<ActionId> = model
        .triggers
        .iter()
        .filter(|t| t.from == *at)
        .map(|t| t.to.clone())
        .collect();
    out.sort();
    out
}

/// Flow targets from `at` in id order. A Transfer sends things inward when
/// they come from outside its thimac and outward otherwise.
fn flow_targets(model: &StaticModel, at: &ActionId, from: Option<&ActionId>) -> Vec<ActionId> {
    let owner_of = |a: &ActionId| model.action(a.as_str()).map(|a| a.owner.clone());
    let here = owner_of(at);
    let mut all: Vec<ActionId> = model
        .flows
        .iter()
        .filter(|f| f.from == *at)
        .map(|f| f.to.clone())
        .collect();
    all.sort();
    let is_transfer = model.action(at.as_str()).is_some_and(|a| a.kind == ActionKind::Transfer);
    if !is_transfer {
        return all;
    }
    let inward = from.is_none_or(|f| owner_of(f) != here);
    let directed: Vec<ActionId> = all
        .iter()
        .filter(|b| (owner_of(b) == here) == inward)
        .cloned()
        .collect();
    if directed.is_empty() {
        all.into_iter().filter(|b| Some(b) != from).collect()
    } else {
        directed
    }
}

/// A thimac's way in: its create, else its first transfer that passes
/// things inward.
fn entry_action(model: &StaticModel, thimac: &ThimacId) -> Option<ActionId> {
    let actions: Vec<_> = model.actions_of(thimac).collect();
    if let Some(c) = actions.iter().find(|a| a.kind == ActionKind::Create) {
        return Some(c.id.clone());
    }
    let mut transfers: Vec<&ActionId> = actions
        .iter()
        .filter(|a| a.kind == ActionKind::Transfer)
        .filter(|a| {
            model.flows.iter().any(|f| {
                f.from == a.id && model.action(f.to.as_str()).is_some_and(|b| b.owner == *thimac)
            })
        })
        .map(|a| &a.id)
        .collect();
    transfers.sort();
    transfers.first().map(|a| (*a).clone())
}

/// Decision points reachable from the injection heads that the scenario
/// does not decide. Chosen branches are the only ones followed.
fn missing_choices(model: &StaticModel, scenario: &Scenario) -> Vec<ActionId> {
    let mut seen: BTreeSet<ActionId> = BTreeSet::new();
    let mut missing = Vec::new();
    let mut stack: Vec<ActionId> = scenario.injections.clone();
    while let Some(a) = stack.pop() {
        if !seen.insert(a.clone()) {
            continue;
        }
        let successors = model.successors(&a);
        if model.is_decision_point(&a) {
            if let Some(picks) = scenario.choices.get(&a) {
                stack.extend(picks.iter().cloned());
                continue;
            }
            missing.push(a.clone());
        }
        stack.extend(successors.into_iter().map(|(s, _)| s));
    }
    missing.sort();
    missing
}
