//! DOT output. Semantics live in shape and style only: thimacs are nested
//! clusters, flows solid, triggers dashed, storage a cylinder.
//!
//! DOT clusters cannot overlap, so event regions are not drawn as boxes.
//! Region members get a bold border and an `xlabel` listing their events,
//! and a legend cluster holds one node per event.

use std::collections::BTreeMap;
use std::fmt::{self, Write};

use crate::diagnostic::{codes, Diagnostic};
use crate::events::{induce_region, Chronology, EventDef};
use crate::metamodel::{Action, StaticModel, ThimacId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DotKind {
    Static,
    Dynamic,
    Chronology,
}

impl DotKind {
    pub fn name(self) -> &'static str {
        match self {
            DotKind::Static => "static",
            DotKind::Dynamic => "dynamic",
            DotKind::Chronology => "chronology",
        }
    }
}

impl fmt::Display for DotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DotDocument {
    pub text: String,
    pub kind: DotKind,
}

/// Quoted DOT id.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Node id of the cylinder standing for an action's storage.
pub fn storage_node(action: &Action) -> String {
    format!("{}~storage", action.id)
}

pub fn export_static(model: &StaticModel) -> DotDocument {
    DotDocument {
        text: render_model(model, &BTreeMap::new(), &[]),
        kind: DotKind::Static,
    }
}

/// The static view with event regions marked. Fails when an event's region
/// does not match the model.
pub fn export_dynamic(model: &StaticModel, events: &[EventDef]) -> Result<DotDocument, Vec<Diagnostic>> {
    let mut membership: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut errors = Vec::new();
    for e in events {
        match induce_region(model, e.region.action_ids.clone()) {
            Ok(r) if r == e.region => {}
            _ => errors.push(
                Diagnostic::error(
                    codes::INVALID_DOCUMENT,
                    format!("region of event `{}` does not fit the model", e.id),
                )
                .at(e.id.as_str()),
            ),
        }
        for a in &e.region.action_ids {
            membership.entry(a.as_str()).or_default().push(e.id.as_str());
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    for ids in membership.values_mut() {
        ids.sort_unstable();
    }
    let mut sorted: Vec<&EventDef> = events.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(DotDocument {
        text: render_model(model, &membership, &sorted),
        kind: DotKind::Dynamic,
    })
}

fn render_model(model: &StaticModel, membership: &BTreeMap<&str, Vec<&str>>, events: &[&EventDef]) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(model.name())).unwrap();
    writeln!(out, "  compound=true;").unwrap();
    writeln!(out, "  node [shape=box, style=rounded];").unwrap();
    render_cluster(model, &model.root, 1, membership, &mut out);

    if !events.is_empty() {
        writeln!(out, "  subgraph \"cluster_legend\" {{").unwrap();
        writeln!(out, "    label=\"events\";").unwrap();
        for e in events {
            let mut label = e.id.to_string();
            if let Some(desc) = &e.description {
                label.push('\n');
                label.push_str(desc);
            }
            writeln!(
                out,
                "    {} [shape=note, penwidth=3, label={}];",
                quote(&format!("event:{}", e.id)),
                quote(&label)
            )
            .unwrap();
        }
        writeln!(out, "  }}").unwrap();
    }

    let mut flows: Vec<_> = model.flows.iter().map(|f| (&f.from, &f.to)).collect();
    flows.sort();
    for (a, b) in flows {
        writeln!(out, "  {} -> {} [style=solid];", quote(a.as_str()), quote(b.as_str())).unwrap();
    }
    let mut triggers: Vec<_> = model.triggers.iter().map(|t| (&t.from, &t.to)).collect();
    triggers.sort();
    for (a, b) in triggers {
        writeln!(out, "  {} -> {} [style=dashed];", quote(a.as_str()), quote(b.as_str())).unwrap();
    }
    for a in &model.actions {
        if a.storage {
            writeln!(
                out,
                "  {} -> {} [style=solid, arrowhead=none];",
                quote(a.id.as_str()),
                quote(&storage_node(a))
            )
            .unwrap();
        }
    }
    out.push_str("}\n");
    out
}

fn render_cluster(
    model: &StaticModel,
    id: &ThimacId,
    depth: usize,
    membership: &BTreeMap<&str, Vec<&str>>,
    out: &mut String,
) {
    let pad = "  ".repeat(depth);
    let t = model.thimac(id.as_str()).expect("thimac of the model");
    writeln!(out, "{pad}subgraph {} {{", quote(&format!("cluster_{id}"))).unwrap();
    let mut label = t.name.clone();
    if let Some(tag) = t.kind_note {
        label.push_str(&format!(" [{}]", tag.keyword()));
    }
    writeln!(out, "{pad}  label={};", quote(&label)).unwrap();
    for a in model.actions_of(id) {
        let mut label = a.kind.keyword().to_owned();
        if let Some(l) = &a.label {
            label.push('\n');
            label.push_str(l);
        }
        let mut attrs = format!("label={}", quote(&label));
        if let Some(events) = membership.get(a.id.as_str()) {
            attrs.push_str(&format!(", penwidth=3, xlabel={}", quote(&events.join(","))));
        }
        writeln!(out, "{pad}  {} [{attrs}];", quote(a.id.as_str())).unwrap();
        if a.storage {
            writeln!(out, "{pad}  {} [shape=cylinder, label=\"\"];", quote(&storage_node(a))).unwrap();
        }
    }
    for child in model.children(id) {
        render_cluster(model, &child.id, depth + 1, membership, out);
    }
    writeln!(out, "{pad}}}").unwrap();
}

/// Events as nodes; forward edges solid, repeat edges dashed and labeled.
pub fn export_chronology(chronology: &Chronology) -> DotDocument {
    let mut out = String::new();
    writeln!(out, "digraph \"chronology\" {{").unwrap();
    writeln!(out, "  node [shape=box];").unwrap();
    for n in &chronology.nodes {
        writeln!(out, "  {};", quote(n.as_str())).unwrap();
    }
    for (a, b) in &chronology.forward_edges {
        writeln!(out, "  {} -> {} [style=solid];", quote(a.as_str()), quote(b.as_str())).unwrap();
    }
    for (a, b) in &chronology.repeat_edges {
        writeln!(
            out,
            "  {} -> {} [style=dashed, label=\"repeat\"];",
            quote(a.as_str()),
            quote(b.as_str())
        )
        .unwrap();
    }
    out.push_str("}\n");
    DotDocument {
        text: out,
        kind: DotKind::Chronology,
    }
}
