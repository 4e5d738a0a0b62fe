//! Executable thinging-machine (TM) models.
//!
//! * [`metamodel`]: thimacs, actions, flows, triggers and static validation.
//! * [`dsl`]: the `.tm` text format (parser with source spans, canonical serializer).
//! * [`events`]: regions, event definitions, chronology derivation and coverage.
//! * [`sim`]: deterministic simulation with existence/subsistence tracking,
//!   the first-occurrence region registry and information footprints.
//! * [`export`]: DOT documents for static, dynamic and chronology views.

macro_rules! id_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                $name(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl std::fmt::Display for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_owned())
            }
        }

        impl std::borrow::Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

pub mod diagnostic;
pub mod dsl;
pub mod events;
pub mod export;
pub mod metamodel;
pub mod sim;

pub use diagnostic::{Diagnostic, Severity, SourceSpan};
pub use dsl::{parse, serialize, ModelDocument};
pub use events::{coverage, derive_chronology, extract_region, Chronology, Coverage, EventDef, EventId, Region, RegionId};
pub use metamodel::{
    expand_implicit_creates, flow_legal, validate_static, Action, ActionId, ActionKind, StaticModel, Thimac, ThimacId,
};
pub use sim::{Mode, Scenario, Simulator};
