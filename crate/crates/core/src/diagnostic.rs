//! Diagnostics shared by every stage: validation, parsing, region extraction
//! and simulation all report problems as a list of [`Diagnostic`]s.

use std::fmt;

/// A 1-based line/column range inside a named source file.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SourceSpan {
    pub file: String,
    pub start_line: usize,
    pub start_col: usize,
    pub end_line: usize,
    pub end_col: usize,
}

impl SourceSpan {
    pub fn new(
        file: impl Into<String>,
        (start_line, start_col): (usize, usize),
        (end_line, end_col): (usize, usize),
    ) -> Self {
        debug_assert!((start_line, start_col) <= (end_line, end_col));
        SourceSpan {
            file: file.into(),
            start_line,
            start_col,
            end_line,
            end_col,
        }
    }

    /// Smallest span covering both `self` and `other`.
    pub fn join(&self, other: &SourceSpan) -> SourceSpan {
        let start = (self.start_line, self.start_col).min((other.start_line, other.start_col));
        let end = (self.end_line, self.end_col).max((other.end_line, other.end_col));
        SourceSpan::new(self.file.clone(), start, end)
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.start_line, self.start_col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

/// Where a diagnostic points: a model element id, and its source span when
/// the element came from text.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Site {
    pub element: Option<String>,
    pub span: Option<SourceSpan>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub site: Site,
}

impl Diagnostic {
    pub fn error(code: &'static str, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            site: Site {
                element: None,
                span: None,
            },
        }
    }

    pub fn warning(code: &'static str, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            ..Diagnostic::error(code, message)
        }
    }

    pub fn at(mut self, element: impl Into<String>) -> Self {
        self.site.element = Some(element.into());
        self
    }

    pub fn with_span(mut self, span: SourceSpan) -> Self {
        self.site.span = Some(span);
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let severity = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        if let Some(span) = &self.site.span {
            write!(f, "{span}: ")?;
        }
        write!(f, "{severity}[{}]: {}", self.code, self.message)?;
        if let Some(element) = &self.site.element {
            write!(f, " (at {element})")?;
        }
        Ok(())
    }
}

/// True when any diagnostic in the list is an error.
pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(Diagnostic::is_error)
}

/// Diagnostic codes. Kept as constants so tests and tools can match on them.
pub mod codes {
    pub const DUPLICATE_ID: &str = "DUPLICATE_ID";
    pub const DUPLICATE_NAME: &str = "DUPLICATE_NAME";
    pub const UNKNOWN_ROOT: &str = "UNKNOWN_ROOT";
    pub const UNKNOWN_PARENT: &str = "UNKNOWN_PARENT";
    pub const DETACHED_THIMAC: &str = "DETACHED_THIMAC";
    pub const CONTAINMENT_CYCLE: &str = "CONTAINMENT_CYCLE";
    pub const UNKNOWN_OWNER: &str = "UNKNOWN_OWNER";
    pub const MULTIPLE_CREATE: &str = "MULTIPLE_CREATE";
    pub const IMPLICIT_CREATE_CONFLICT: &str = "IMPLICIT_CREATE_CONFLICT";
    pub const UNKNOWN_ACTION: &str = "UNKNOWN_ACTION";
    pub const FLOW_ILLEGAL: &str = "FLOW_ILLEGAL";
    pub const DUPLICATE_FLOW: &str = "DUPLICATE_FLOW";
    pub const DUPLICATE_TRIGGER: &str = "DUPLICATE_TRIGGER";
    pub const TRIGGER_SELF: &str = "TRIGGER_SELF";
    pub const TRIGGER_DUPLICATES_FLOW: &str = "TRIGGER_DUPLICATES_FLOW";
    pub const ORPHAN_ACTION: &str = "ORPHAN_ACTION";
    pub const DANGLING_TRANSFER: &str = "DANGLING_TRANSFER";

    pub const LEX_ERROR: &str = "LEX_ERROR";
    pub const PARSE_ERROR: &str = "PARSE_ERROR";
    pub const REF_ERROR: &str = "REF_ERROR";
    pub const DUPLICATE_EVENT: &str = "DUPLICATE_EVENT";
    pub const DUPLICATE_SCENARIO: &str = "DUPLICATE_SCENARIO";
    pub const CHOICE_NOT_DECISION: &str = "CHOICE_NOT_DECISION";
    pub const CHOICE_NOT_SUCCESSOR: &str = "CHOICE_NOT_SUCCESSOR";
    pub const INJECTION_KIND: &str = "INJECTION_KIND";
    pub const UNSERIALIZABLE: &str = "UNSERIALIZABLE";

    pub const REGION_EMPTY: &str = "REGION_EMPTY";
    pub const REGION_DISCONNECTED: &str = "REGION_DISCONNECTED";

    pub const UNKNOWN_SCENARIO: &str = "UNKNOWN_SCENARIO";
    pub const MISSING_CHOICE: &str = "MISSING_CHOICE";
    pub const STUCK_THING: &str = "STUCK_THING";
    pub const BUDGET: &str = "BUDGET";
    pub const INVALID_DOCUMENT: &str = "INVALID_DOCUMENT";
}
