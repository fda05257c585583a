//! Source spans and coded diagnostics shared by the parser and the
//! validation passes. Codes are stable strings from the documented
//! registry (`P0xx` parse, `V1xx` validation); see docs/codes.md.

use std::fmt;

/// A byte range in the source text plus the 1-based line/column of its start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub column: u32,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize, line: u32, column: u32) -> Self {
        debug_assert!(start <= end);
        SourceSpan { start, end, line, column }
    }

    /// Span used for elements that were built programmatically rather
    /// than parsed; points at the start of a (possibly imaginary) source.
    pub fn synthetic() -> Self {
        SourceSpan { start: 0, end: 0, line: 1, column: 1 }
    }
}

/// Diagnostic severity. Only `Error` findings make a model inadmissible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Error => f.write_str("error"),
            Severity::Warning => f.write_str("warning"),
        }
    }
}

/// A coded, span-carrying parse or validation finding.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Diagnostic {
    pub code: &'static str,
    pub severity: Severity,
    pub message: String,
    pub span: SourceSpan,
}

impl Diagnostic {
    pub fn error(code: &'static str, message: impl Into<String>, span: SourceSpan) -> Self {
        Diagnostic { code, severity: Severity::Error, message: message.into(), span }
    }

    pub fn warning(code: &'static str, message: impl Into<String>, span: SourceSpan) -> Self {
        Diagnostic { code, severity: Severity::Warning, message: message.into(), span }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {}:{} {}",
            self.code, self.severity, self.span.line, self.span.column, self.message
        )
    }
}

pub mod codes {
    //! The stable diagnostic code registry.

    /// Unexpected token or character.
    pub const P001: &str = "P001";
    /// Unterminated string literal.
    pub const P002: &str = "P002";
    /// Duplicate declaration of an id (or a second `causes` for one target).
    pub const P003: &str = "P003";
    /// Unknown keyword, enum word, or rejected encoding (BOM).
    pub const P004: &str = "P004";

    /// Dangling reference: an id that resolves to nothing.
    pub const V101: &str = "V101";
    /// Reference mismatch: resolves to the wrong category, role, tier,
    /// or scope (includes cyclic `part_of` chains).
    pub const V102: &str = "V102";
    /// Two adverse events violate the same constraint.
    pub const V110: &str = "V110";
    /// Constraint with no corresponding adverse event (warning).
    pub const V111: &str = "V111";
    /// Cause edge flows upward: tier(source) < tier(target).
    pub const V120: &str = "V120";
    /// The cause relation has a directed cycle.
    pub const V130: &str = "V130";
    /// Subsystem/interaction constraint enforced by no loop (warning).
    pub const V140: &str = "V140";
    /// Risk with no cause declaration (warning).
    pub const V141: &str = "V141";
}
