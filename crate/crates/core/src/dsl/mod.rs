//! The `.tm` text format.
//!
//! ```text
//! model Shop {
//!   thimac Customer {
//!     create order;
//!     release send;
//!     transfer out;
//!     flow Customer.order -> Customer.send;
//!     flow Customer.send -> Customer.out;
//!   }
//!   event E1 { region { Customer.order, Customer.send } desc "An order is placed"; }
//!   scenario buy { inject Customer.order; }
//! }
//! ```
//!
//! Paths are dotted from the model root. Unlabeled actions are allowed but
//! cannot be referenced.

mod lexer;
mod parser;
mod resolve;
mod serialize;

use std::collections::BTreeMap;

use crate::diagnostic::{Diagnostic, SourceSpan};
use crate::events::EventDef;
use crate::metamodel::StaticModel;
use crate::sim::Scenario;

pub use parser::{is_keyword, KEYWORDS};
pub use serialize::serialize;

/// A parsed (or programmatically built) model with its events and scenarios.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelDocument {
    pub model: StaticModel,
    pub events: Vec<EventDef>,
    pub scenarios: Vec<Scenario>,
    /// Source spans keyed by element id; flows and triggers use their
    /// `a->b` / `a-->b` keys, events and scenarios `event:<id>` and
    /// `scenario:<id>`.
    pub spans: BTreeMap<String, SourceSpan>,
    /// Non-blocking diagnostics found while parsing.
    pub warnings: Vec<Diagnostic>,
}

impl ModelDocument {
    pub fn new(model: StaticModel) -> Self {
        ModelDocument {
            model,
            events: Vec::new(),
            scenarios: Vec::new(),
            spans: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    pub fn event(&self, id: &str) -> Option<&EventDef> {
        self.events.iter().find(|e| e.id.as_str() == id)
    }

    pub fn scenario(&self, id: &str) -> Option<&Scenario> {
        self.scenarios.iter().find(|s| s.id == id)
    }

    /// Order-insensitive form used for structural comparison: element
    /// collections sorted by id, spans and warnings dropped.
    pub fn canonical(&self) -> ModelDocument {
        let mut model = self.model.clone();
        model.thimacs.sort_by(|a, b| a.id.cmp(&b.id));
        model.actions.sort_by(|a, b| a.id.cmp(&b.id));
        model.flows.sort();
        model.triggers.sort();
        let mut events = self.events.clone();
        events.sort_by(|a, b| a.id.cmp(&b.id));
        let mut scenarios = self.scenarios.clone();
        scenarios.sort_by(|a, b| a.id.cmp(&b.id));
        ModelDocument {
            model,
            events,
            scenarios,
            spans: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    /// Equality modulo spans and declaration order.
    pub fn structurally_eq(&self, other: &ModelDocument) -> bool {
        self.canonical() == other.canonical()
    }
}

/// Parses `.tm` text. On failure every error found is returned, each with a
/// source span; warnings ride along in [`ModelDocument::warnings`].
pub fn parse(text: &str, file: &str) -> Result<ModelDocument, Vec<Diagnostic>> {
    let (tokens, mut diagnostics) = lexer::lex(text, file);
    let (tree, syntax) = parser::parse_tokens(&tokens);
    diagnostics.extend(syntax);
    let Some(tree) = tree else {
        return Err(diagnostics);
    };
    let (mut doc, semantic) = resolve::build(tree);
    diagnostics.extend(semantic);
    // Element-level problems without a span of their own point at the model.
    let fallback = doc.spans.get(doc.model.name()).cloned();
    for d in &mut diagnostics {
        if d.site.span.is_none() {
            d.site.span = fallback.clone();
        }
    }
    let (errors, warnings): (Vec<_>, Vec<_>) = diagnostics.into_iter().partition(Diagnostic::is_error);
    if errors.is_empty() {
        doc.warnings = warnings;
        Ok(doc)
    } else {
        Err(errors.into_iter().chain(warnings).collect())
    }
}
