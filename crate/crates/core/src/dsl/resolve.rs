//! Turns the syntax tree into a [`ModelDocument`]: mints ids through the
//! model builder, resolves every path and runs static validation.

use std::collections::{BTreeMap, BTreeSet};

use super::parser::{Directive, Document, Member, Path, ThimacDecl};
use super::ModelDocument;
use crate::diagnostic::{codes, Diagnostic, SourceSpan};
use crate::events::{induce_region, EventDef, EventId};
use crate::metamodel::{validate_static, ActionId, ActionKind, Element, StaticModel, ThimacId};
use crate::sim::Scenario;

struct PendingEdge {
    trigger: bool,
    from: Path,
    to: Path,
    span: SourceSpan,
}

pub fn build(doc: Document) -> (ModelDocument, Vec<Diagnostic>) {
    let mut model = StaticModel::new(&doc.name);
    let mut spans = BTreeMap::new();
    let mut diagnostics = Vec::new();
    spans.insert(doc.name.clone(), doc.name_span.clone());

    let mut edges = Vec::new();
    let root = model.root.clone();
    for t in &doc.thimacs {
        declare(&mut model, &root, t, &mut spans, &mut edges);
    }

    for e in edges {
        let from = resolve_action(&model, &e.from);
        let to = resolve_action(&model, &e.to);
        match (from, to) {
            (Ok(from), Ok(to)) => {
                let key = if e.trigger {
                    model.add_trigger(&from, &to);
                    model.triggers.last().map(|t| t.key())
                } else {
                    model.add_flow(&from, &to);
                    model.flows.last().map(|f| f.key())
                };
                spans.insert(key.unwrap_or_default(), e.span);
            }
            (from, to) => diagnostics.extend(from.err().into_iter().chain(to.err())),
        }
    }

    for d in validate_static(&model) {
        let span = d.site.element.as_ref().and_then(|e| spans.get(e)).cloned();
        diagnostics.push(match span {
            Some(span) => d.with_span(span),
            None => d,
        });
    }

    let mut events = Vec::new();
    let mut event_names = BTreeSet::new();
    for e in &doc.events {
        let key = format!("event:{}", e.name);
        if !event_names.insert(e.name.clone()) {
            diagnostics.push(
                Diagnostic::error(codes::DUPLICATE_EVENT, format!("event `{}` is declared twice", e.name))
                    .at(e.name.as_str())
                    .with_span(e.span.clone()),
            );
            continue;
        }
        spans.insert(key, e.span.clone());
        let mut actions = BTreeSet::new();
        let mut ok = true;
        for p in &e.paths {
            match model.resolve_path(&p.text()) {
                Some(Element::Action(a)) => {
                    actions.insert(a);
                }
                Some(Element::Thimac(t)) => actions.extend(model.actions_of(&t).map(|a| a.id.clone())),
                None => {
                    ok = false;
                    diagnostics.push(unresolved(p));
                }
            }
        }
        if !ok {
            continue;
        }
        match induce_region(&model, actions) {
            Ok(region) => events.push(EventDef {
                id: EventId::new(e.name.as_str()),
                name: e.name.clone(),
                selectors: e.paths.iter().map(Path::text).collect(),
                region,
                description: e.desc.clone(),
            }),
            Err(errs) => diagnostics.extend(
                errs.into_iter()
                    .map(|d| d.at(e.name.as_str()).with_span(e.span.clone())),
            ),
        }
    }

    let mut scenarios: Vec<Scenario> = Vec::new();
    for s in &doc.scenarios {
        if scenarios.iter().any(|x| x.id == s.name) {
            diagnostics.push(
                Diagnostic::error(codes::DUPLICATE_SCENARIO, format!("scenario `{}` is declared twice", s.name))
                    .at(s.name.as_str())
                    .with_span(s.span.clone()),
            );
            continue;
        }
        spans.insert(format!("scenario:{}", s.name), s.span.clone());
        let mut scenario = Scenario::new(&s.name);
        for d in &s.directives {
            match directive(&model, d) {
                Ok(Resolved::Choice(decision, successor)) => {
                    scenario.choices.entry(decision).or_default().push(successor)
                }
                Ok(Resolved::Injection(head)) => scenario.injections.push(head),
                Err(d) => diagnostics.push(d),
            }
        }
        scenarios.push(scenario);
    }

    let doc = ModelDocument {
        model,
        events,
        scenarios,
        spans,
        warnings: Vec::new(),
    };
    (doc, diagnostics)
}

fn declare(
    model: &mut StaticModel,
    parent: &ThimacId,
    decl: &ThimacDecl,
    spans: &mut BTreeMap<String, SourceSpan>,
    edges: &mut Vec<PendingEdge>,
) {
    let id = model.add_thimac(parent, &decl.name, decl.tag);
    spans.insert(id.to_string(), decl.span.clone());
    for m in &decl.members {
        match m {
            Member::Thimac(t) => declare(model, &id, t, spans, edges),
            Member::Action {
                kind,
                label,
                storage,
                span,
            } => {
                let a = model.add_action(&id, *kind, label.as_deref(), *storage);
                spans.insert(a.to_string(), span.clone());
            }
            Member::Flow { from, to, span } | Member::Trigger { from, to, span } => edges.push(PendingEdge {
                trigger: matches!(m, Member::Trigger { .. }),
                from: from.clone(),
                to: to.clone(),
                span: span.clone(),
            }),
        }
    }
}

fn unresolved(path: &Path) -> Diagnostic {
    Diagnostic::error(
        codes::REF_ERROR,
        format!("`{}` does not name a thimac or action", path.text()),
    )
    .at(path.text())
    .with_span(path.span.clone())
}

fn resolve_action(model: &StaticModel, path: &Path) -> Result<ActionId, Diagnostic> {
    match model.resolve_path(&path.text()) {
        Some(Element::Action(a)) => Ok(a),
        Some(Element::Thimac(_)) => Err(Diagnostic::error(
            codes::REF_ERROR,
            format!("`{}` names a thimac; an action is required here", path.text()),
        )
        .at(path.text())
        .with_span(path.span.clone())),
        None => Err(unresolved(path)),
    }
}

enum Resolved {
    Choice(ActionId, ActionId),
    Injection(ActionId),
}

fn directive(model: &StaticModel, d: &Directive) -> Result<Resolved, Diagnostic> {
    match d {
        Directive::Choose {
            decision,
            successor,
            span,
        } => {
            let at = resolve_action(model, decision)?;
            if !model.is_decision_point(&at) {
                return Err(Diagnostic::error(
                    codes::CHOICE_NOT_DECISION,
                    format!("`{}` is not a process with two or more successors", decision.text()),
                )
                .at(at.as_str())
                .with_span(span.clone()));
            }
            let matching: Vec<ActionId> = model
                .successors(&at)
                .into_iter()
                .map(|(s, _)| s)
                .filter(|s| model.action(s.as_str()).and_then(|a| a.label.as_deref()) == Some(successor.as_str()))
                .collect();
            match matching.as_slice() {
                [one] => Ok(Resolved::Choice(at, one.clone())),
                [] => Err(Diagnostic::error(
                    codes::CHOICE_NOT_SUCCESSOR,
                    format!("`{successor}` is not a successor of `{}`", decision.text()),
                )
                .at(at.as_str())
                .with_span(span.clone())),
                _ => Err(Diagnostic::error(
                    codes::CHOICE_NOT_SUCCESSOR,
                    format!("`{successor}` names several successors of `{}`", decision.text()),
                )
                .at(at.as_str())
                .with_span(span.clone())),
            }
        }
        Directive::Inject { head, span } => {
            let at = resolve_action(model, head)?;
            let kind = model.action(at.as_str()).map(|a| a.kind);
            if matches!(kind, Some(ActionKind::Transfer | ActionKind::Create)) {
                Ok(Resolved::Injection(at))
            } else {
                Err(Diagnostic::error(
                    codes::INJECTION_KIND,
                    format!("things can only be injected at a transfer or create, not at `{}`", head.text()),
                )
                .at(at.as_str())
                .with_span(span.clone()))
            }
        }
    }
}
