//! Canonical text output. Only documents whose ids and selectors can be
//! reproduced by parsing the emitted text are accepted.

use std::fmt::Write;

use super::parser::is_keyword;
use super::ModelDocument;
use crate::diagnostic::{codes, has_errors, Diagnostic};
use crate::events::extract_region;
use crate::metamodel::{validate_static, ActionId, ActionKind, StaticModel, ThimacId};

const INDENT: &str = "  ";

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !is_keyword(s)
}

fn unserializable(message: impl Into<String>, element: &str) -> Diagnostic {
    Diagnostic::error(codes::UNSERIALIZABLE, message).at(element)
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Checks that parsing the emitted text would mint the very same ids.
fn check(doc: &ModelDocument) -> Vec<Diagnostic> {
    let model = &doc.model;
    let mut out: Vec<Diagnostic> = validate_static(model).into_iter().filter(Diagnostic::is_error).collect();
    if !out.is_empty() {
        return out;
    }
    if !is_ident(model.name()) {
        out.push(unserializable(format!("model name `{}` is not an identifier", model.name()), model.name()));
    }
    for t in &model.thimacs {
        if t.id == model.root {
            if !t.implicit_create || t.kind_note.is_some() {
                out.push(unserializable("the root thimac has no written form for its attributes", t.id.as_str()));
            }
            continue;
        }
        if !is_ident(&t.name) {
            out.push(unserializable(format!("thimac name `{}` is not an identifier", t.name), t.id.as_str()));
        }
        let parent = t.parent.as_ref().expect("validated");
        let minted = if *parent == model.root {
            ThimacId::new(t.name.as_str())
        } else {
            ThimacId::new(format!("{parent}.{}", t.name))
        };
        if minted != t.id {
            out.push(unserializable(format!("thimac id `{}` does not follow its path", t.id), t.id.as_str()));
        }
        let has_create = model.actions_of(&t.id).any(|a| a.kind == ActionKind::Create);
        if t.implicit_create == has_create {
            out.push(unserializable(
                "implicit-create flag disagrees with the presence of a create action",
                t.id.as_str(),
            ));
        }
    }
    let mut ordinals = std::collections::HashMap::new();
    for a in &model.actions {
        if a.owner == model.root {
            out.push(unserializable("actions owned by the root cannot be written", a.id.as_str()));
            continue;
        }
        if a.is_synthesized() {
            out.push(unserializable("synthesized creates cannot be written", a.id.as_str()));
            continue;
        }
        let minted = match &a.label {
            Some(label) => {
                if !is_ident(label) {
                    out.push(unserializable(format!("label `{label}` is not an identifier"), a.id.as_str()));
                }
                ActionId::new(format!("{}.{label}", a.owner))
            }
            None => {
                let n = ordinals.entry((&a.owner, a.kind)).or_insert(0);
                *n += 1;
                ActionId::new(format!("{}.#{}{n}", a.owner, a.kind))
            }
        };
        if minted != a.id {
            out.push(unserializable(format!("action id `{}` does not follow its path", a.id), a.id.as_str()));
        }
    }
    let edges = model
        .flows
        .iter()
        .map(|f| (&f.from, &f.to))
        .chain(model.triggers.iter().map(|t| (&t.from, &t.to)));
    for (from, to) in edges {
        for end in [from, to] {
            if model.action_path(end).is_none() {
                out.push(unserializable(format!("edge endpoint `{end}` has no label"), end.as_str()));
            }
        }
    }
    for e in &doc.events {
        if e.id.as_str() != e.name || !is_ident(&e.name) {
            out.push(unserializable(
                format!("event `{}` needs an identifier name equal to its id", e.id),
                e.id.as_str(),
            ));
        }
        if extract_region(model, &e.selectors).ok().as_ref() != Some(&e.region) {
            out.push(unserializable(
                format!("selectors of event `{}` do not reproduce its region", e.id),
                e.id.as_str(),
            ));
        }
    }
    let mut names = std::collections::HashSet::new();
    for s in &doc.scenarios {
        if !is_ident(&s.id) || !names.insert(&s.id) {
            out.push(unserializable(format!("scenario `{}` needs a unique identifier name", s.id), &s.id));
        }
        for (decision, successors) in &s.choices {
            if model.action_path(decision).is_none() || !model.is_decision_point(decision) {
                out.push(unserializable(format!("`{decision}` is not an addressable decision point"), &s.id));
            }
            for succ in successors {
                let label = model.action(succ.as_str()).and_then(|a| a.label.as_deref());
                let unique = model
                    .successors(decision)
                    .iter()
                    .filter(|(x, _)| model.action(x.as_str()).and_then(|a| a.label.as_deref()) == label)
                    .count()
                    == 1;
                if label.is_none() || !unique || !model.successors(decision).iter().any(|(x, _)| x == succ) {
                    out.push(unserializable(
                        format!("`{succ}` is not an unambiguous successor of `{decision}`"),
                        &s.id,
                    ));
                }
            }
        }
        for head in &s.injections {
            let kind = model.action(head.as_str()).map(|a| a.kind);
            if model.action_path(head).is_none() || !matches!(kind, Some(ActionKind::Create | ActionKind::Transfer)) {
                out.push(unserializable(format!("`{head}` is not an addressable injection head"), &s.id));
            }
        }
    }
    out
}

/// Emits the canonical `.tm` text for `doc`.
pub fn serialize(doc: &ModelDocument) -> Result<String, Vec<Diagnostic>> {
    let diagnostics = check(doc);
    if has_errors(&diagnostics) {
        return Err(diagnostics);
    }
    let model = &doc.model;
    let mut out = String::new();
    writeln!(out, "model {} {{", model.name()).unwrap();
    for t in model.children(&model.root) {
        write_thimac(model, &t.id, 1, &mut out);
    }
    for e in &doc.events {
        writeln!(out, "{INDENT}event {} {{", e.name).unwrap();
        writeln!(out, "{INDENT}{INDENT}region {{ {} }}", e.selectors.join(", ")).unwrap();
        if let Some(desc) = &e.description {
            writeln!(out, "{INDENT}{INDENT}desc {};", quote(desc)).unwrap();
        }
        writeln!(out, "{INDENT}}}").unwrap();
    }
    for s in &doc.scenarios {
        writeln!(out, "{INDENT}scenario {} {{", s.id).unwrap();
        for (decision, successors) in &s.choices {
            let path = model.action_path(decision).expect("checked");
            for succ in successors {
                let label = model.action(succ.as_str()).and_then(|a| a.label.as_deref()).expect("checked");
                writeln!(out, "{INDENT}{INDENT}choose {path} = {label};").unwrap();
            }
        }
        for head in &s.injections {
            writeln!(out, "{INDENT}{INDENT}inject {};", model.action_path(head).expect("checked")).unwrap();
        }
        writeln!(out, "{INDENT}}}").unwrap();
    }
    out.push_str("}\n");
    Ok(out)
}

fn write_thimac(model: &StaticModel, id: &ThimacId, depth: usize, out: &mut String) {
    let pad = INDENT.repeat(depth);
    let t = model.thimac(id.as_str()).expect("child of a valid model");
    match t.kind_note {
        Some(tag) => writeln!(out, "{pad}thimac {} [{}] {{", t.name, tag.keyword()).unwrap(),
        None => writeln!(out, "{pad}thimac {} {{", t.name).unwrap(),
    }

    // Stable sort keeps unlabeled actions in their original order, which
    // reproduces their ordinal ids.
    let mut actions: Vec<_> = model.actions_of(id).collect();
    actions.sort_by(|a, b| (a.kind, &a.label).cmp(&(b.kind, &b.label)));
    for a in actions {
        let mut line = format!("{pad}{INDENT}{}", a.kind);
        if let Some(label) = &a.label {
            line.push(' ');
            line.push_str(label);
        }
        if a.storage {
            line.push_str(" storage");
        }
        line.push(';');
        writeln!(out, "{line}").unwrap();
    }

    let owned = |from: &ActionId| model.action(from.as_str()).is_some_and(|a| a.owner == *id);
    let path = |a: &ActionId| model.action_path(a).expect("checked");
    let mut flows: Vec<(String, String)> = model
        .flows
        .iter()
        .filter(|f| owned(&f.from))
        .map(|f| (path(&f.from), path(&f.to)))
        .collect();
    flows.sort();
    for (from, to) in flows {
        writeln!(out, "{pad}{INDENT}flow {from} -> {to};").unwrap();
    }
    let mut triggers: Vec<(String, String)> = model
        .triggers
        .iter()
        .filter(|t| owned(&t.from))
        .map(|t| (path(&t.from), path(&t.to)))
        .collect();
    triggers.sort();
    for (from, to) in triggers {
        writeln!(out, "{pad}{INDENT}trigger {from} --> {to};").unwrap();
    }

    for child in model.children(id) {
        write_thimac(model, &child.id, depth + 1, out);
    }
    writeln!(out, "{pad}}}").unwrap();
}
