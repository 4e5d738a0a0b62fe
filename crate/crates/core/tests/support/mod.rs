//! Helpers shared by the integration test targets.
#![allow(dead_code)]

pub mod dot;
pub mod gen;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use tm_core::metamodel::Element;
use tm_core::sim::{Place, Step, DEFAULT_BUDGET};
use tm_core::{parse, EventId, Mode, ModelDocument, RegionId, Simulator};

pub const FIXTURES: [&str; 5] = ["smart_factory", "loan_broker", "cat_mat", "bulb_punchcard", "traffic"];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(format!("{name}.tm"))
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("reading fixture {name}: {e}"))
}

pub fn load(name: &str) -> ModelDocument {
    let path = fixture_path(name);
    parse(&fixture_text(name), &path.display().to_string())
        .unwrap_or_else(|d| panic!("fixture {name} does not parse: {d:#?}"))
}

/// `// @step N: <element> ...` lines, keyed by N. Fails on a repeated N.
pub fn audit_steps(text: &str) -> Result<BTreeMap<u32, String>, String> {
    let mut steps = BTreeMap::new();
    for line in text.lines() {
        let Some(rest) = line.trim().strip_prefix("// @step ") else {
            continue;
        };
        let (n, element) = rest.split_once(':').ok_or_else(|| format!("malformed audit line `{line}`"))?;
        let n: u32 = n.trim().parse().map_err(|_| format!("bad step number in `{line}`"))?;
        if steps.insert(n, element.trim().to_owned()).is_some() {
            return Err(format!("step {n} annotated twice"));
        }
    }
    Ok(steps)
}

/// Resolves the element named at the start of an audit annotation to a
/// unique key, or explains why it does not name a model element.
pub fn audit_element(doc: &ModelDocument, annotation: &str) -> Result<String, String> {
    let model = &doc.model;
    let words: Vec<&str> = annotation.split_whitespace().collect();
    let action = |path: &str| match model.resolve_path(path) {
        Some(Element::Action(id)) => Ok(id.to_string()),
        _ => Err(format!("`{path}` is not an action")),
    };
    match words.as_slice() {
        ["flow", a, "->", b, ..] => {
            let (a, b) = (action(a)?, action(b)?);
            model
                .flows
                .iter()
                .any(|f| f.from.as_str() == a && f.to.as_str() == b)
                .then(|| format!("flow {a}->{b}"))
                .ok_or_else(|| format!("no flow {a} -> {b}"))
        }
        ["trigger", a, "-->", b, ..] => {
            let (a, b) = (action(a)?, action(b)?);
            model
                .triggers
                .iter()
                .any(|t| t.from.as_str() == a && t.to.as_str() == b)
                .then(|| format!("trigger {a}-->{b}"))
                .ok_or_else(|| format!("no trigger {a} --> {b}"))
        }
        ["thimac", t, ..] => match model.resolve_path(t) {
            Some(Element::Thimac(id)) => Ok(format!("thimac {id}")),
            _ => Err(format!("`{t}` is not a thimac")),
        },
        [path, ..] => action(path).map(|a| format!("action {a}")),
        [] => Err("empty annotation".into()),
    }
}

/// Checks that steps 1..=n are each annotated once and name n distinct
/// model elements.
pub fn check_audit(name: &str, n: u32) -> Result<(), String> {
    let text = fixture_text(name);
    let doc = load(name);
    let steps = audit_steps(&text)?;
    let numbers: Vec<u32> = steps.keys().copied().collect();
    if numbers != (1..=n).collect::<Vec<_>>() {
        return Err(format!("expected steps 1..={n}, found {numbers:?}"));
    }
    let mut seen = BTreeMap::new();
    for (step, annotation) in &steps {
        let key = audit_element(&doc, annotation).map_err(|e| format!("step {step}: {e}"))?;
        if let Some(other) = seen.insert(key.clone(), step) {
            return Err(format!("steps {other} and {step} both map to {key}"));
        }
    }
    Ok(())
}

/// Event ids of a trace, in firing order.
pub fn fired(sim: &Simulator) -> Vec<String> {
    sim.trace().iter().map(|o| o.event_id.to_string()).collect()
}

/// Runs `scenario` and checks the run invariants along the way:
/// * mode soundness: during a firing exactly the firing region exists, and
///   after the run every region subsists;
/// * enabling: the fired event held a pending thing and none of its forward
///   predecessors did;
/// * chronology respect: for each forward edge (a, b) with both fired, the
///   first firing of a precedes the first firing of b;
/// * registry monotonicity: registration ticks strictly increase, each
///   region registers once, at its first occurrence;
/// * footprint/occurrence bijection;
/// * negative regions are exactly those never fired.
///
/// Returns the trace text.
pub fn run_checked(doc: &ModelDocument, scenario: &str) -> Result<String, String> {
    run_checked_within(doc, scenario, DEFAULT_BUDGET, true)
}

/// [`run_checked`] with a step budget of its own. Chronology respect is only
/// checked when `respect` is set: a thing that enters in the middle of a
/// cycle of regions can cross a repeat edge before the forward source of
/// that cycle ever fires.
pub fn run_checked_within(doc: &ModelDocument, scenario: &str, budget: usize, respect: bool) -> Result<String, String> {
    let mut sim = Simulator::new(doc, scenario)
        .map_err(|e| e.to_string())?
        .with_thing_limit(budget * 20);
    let mut existing_during: Vec<Vec<RegionId>> = Vec::new();
    let mut registry_sizes = Vec::new();
    for _ in 0..budget {
        let pending: BTreeSet<String> = sim
            .state()
            .things
            .iter()
            .filter_map(|t| match &t.place {
                Place::Pending { at, .. } => Some(at.to_string()),
                _ => None,
            })
            .collect();
        let holds = |e: &EventId| {
            doc.event(e.as_str())
                .is_some_and(|e| e.region.action_ids.iter().any(|a| pending.contains(a.as_str())))
        };
        let mut seen = Vec::new();
        let step = sim.step_observed(|s| {
            seen = s
                .state()
                .modes
                .iter()
                .filter(|(_, m)| **m == Mode::Existence)
                .map(|(r, _)| r.clone())
                .collect();
        });
        match step {
            Step::Done => break,
            Step::Fired(_) if sim.over_thing_limit() => return Err("budget exhausted".into()),
            Step::Fired(occ) => {
                if seen != vec![occ.region_id.clone()] {
                    return Err(format!("during {} the existing regions were {seen:?}", occ.event_id));
                }
                if !holds(&occ.event_id) {
                    return Err(format!("{} fired without a pending thing", occ.event_id));
                }
                if let Some(p) = sim.chronology().forward_predecessors(&occ.event_id).find(|p| holds(p)) {
                    return Err(format!("{} fired while its predecessor {p} held a thing", occ.event_id));
                }
                if occ.start_tick > occ.end_tick {
                    return Err(format!("occurrence of {} ends before it starts", occ.event_id));
                }
                existing_during.push(seen);
                registry_sizes.push(sim.state().registry.len());
            }
        }
    }
    if sim.step() != Step::Done {
        return Err("budget exhausted".into());
    }
    let state = sim.state();

    if let Some((r, m)) = state.modes.iter().find(|(_, m)| **m != Mode::Subsistence) {
        return Err(format!("region {r} is left in {m:?}"));
    }

    let mut first: BTreeMap<&EventId, usize> = BTreeMap::new();
    for (i, occ) in state.trace.iter().enumerate() {
        first.entry(&occ.event_id).or_insert(i);
    }
    for (a, b) in sim.chronology().forward_edges.iter().filter(|_| respect) {
        if let (Some(fa), Some(fb)) = (first.get(a), first.get(b)) {
            if fa >= fb {
                return Err(format!("forward edge {a} -> {b} not honored"));
            }
        }
    }

    let mut expected_registry: Vec<(RegionId, u64)> = Vec::new();
    for occ in &state.trace {
        if !expected_registry.iter().any(|(r, _)| *r == occ.region_id) {
            expected_registry.push((occ.region_id.clone(), occ.end_tick));
        }
    }
    if state.registry != expected_registry {
        return Err(format!("registry {:?} != first occurrences {expected_registry:?}", state.registry));
    }
    if state.registry.windows(2).any(|w| w[0].1 >= w[1].1) {
        return Err("registration ticks do not increase".into());
    }
    if registry_sizes.windows(2).any(|w| w[0] > w[1]) {
        return Err("the registry shrank".into());
    }

    if state.footprints.len() != state.trace.len() {
        return Err("footprints and occurrences differ in number".into());
    }
    let ids: BTreeSet<&str> = state.footprints.iter().map(|f| f.id.as_str()).collect();
    if ids.len() != state.footprints.len() {
        return Err("footprint ids are not unique".into());
    }
    for (occ, info) in state.trace.iter().zip(&state.footprints) {
        if info.event_id != occ.event_id || info.region_id != occ.region_id || info.tick != occ.end_tick {
            return Err(format!("footprint {} does not match its occurrence", info.id));
        }
    }

    let fired_regions: BTreeSet<&RegionId> = state.trace.iter().map(|o| &o.region_id).collect();
    for e in &doc.events {
        let negative = sim.is_negative(&e.region.id).map_err(|e| e.to_string())?;
        if negative == fired_regions.contains(&e.region.id) {
            return Err(format!("is_negative({}) is {negative}", e.id));
        }
    }
    Ok(sim.trace_text())
}

/// Where the things of a finished run ended, as (thing id, action, tag).
pub fn final_places(sim: &Simulator) -> Vec<(String, String, Option<String>)> {
    sim.state()
        .things
        .iter()
        .map(|t| {
            let at = match &t.place {
                Place::Resting { at } => format!("rest {at}"),
                Place::Pending { at, .. } => format!("pending {at}"),
                Place::Parked { storage, .. } => format!("parked {storage}"),
                Place::Stuck { at } => format!("stuck {at}"),
            };
            (t.id.clone(), at, t.tag.clone())
        })
        .collect()
}

pub fn golden_path(fixture: &str, scenario: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{fixture}.{scenario}.trace"))
}

/// Compares `trace` with its golden file. With `TM_BLESS=1` the golden
/// file is (re)written instead.
pub fn check_golden(fixture: &str, scenario: &str, trace: &str) -> Result<(), String> {
    let path = golden_path(fixture, scenario);
    if std::env::var("TM_BLESS").as_deref() == Ok("1") {
        std::fs::create_dir_all(path.parent().unwrap()).map_err(|e| e.to_string())?;
        std::fs::write(&path, trace).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let golden = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if golden != trace {
        return Err(format!("trace differs from {}", path.display()));
    }
    Ok(())
}

/// Edges of a DOT document drawn with the given style, as quoted endpoint
/// pairs. Storage attachments (no arrowhead) are skipped.
pub fn dot_edges(text: &str, style: &str) -> BTreeSet<(String, String)> {
    let marker = format!("style={style}");
    text.lines()
        .filter(|l| l.contains(" -> ") && l.contains(&marker) && !l.contains("arrowhead=none"))
        .map(|l| {
            let l = l.trim();
            let (a, rest) = l.split_once(" -> ").unwrap();
            let b = rest.split(" [").next().unwrap();
            (a.trim_matches('"').to_owned(), b.trim_matches('"').to_owned())
        })
        .collect()
}
