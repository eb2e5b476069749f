//! Diagnostics channel for validity warnings.
//!
//! Several operations are only approximately valid inside the regime the
//! model assumes (paraxial beams, small out-of-plane intensity, perturbative
//! fidelity estimate). Violations are not errors; they are recorded here so
//! callers can surface them instead of silently dropping them.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Info,
    Warning,
}

#[derive(Debug, Clone)]
pub struct Diagnostic {
    pub severity: Severity,
    /// Stable machine-readable code, e.g. `xi-z-large`.
    pub code: &'static str,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Info => "info",
            Severity::Warning => "warning",
        };
        write!(f, "[{tag}] {}: {}", self.code, self.message)
    }
}

/// Accumulates diagnostics emitted while building models or running solvers.
#[derive(Debug, Default, Clone)]
pub struct Diagnostics {
    entries: Vec<Diagnostic>,
}

impl Diagnostics {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn warn(&mut self, code: &'static str, message: impl Into<String>) {
        self.entries.push(Diagnostic {
            severity: Severity::Warning,
            code,
            message: message.into(),
        });
    }

    pub fn info(&mut self, code: &'static str, message: impl Into<String>) {
        self.entries.push(Diagnostic {
            severity: Severity::Info,
            code,
            message: message.into(),
        });
    }

    pub fn entries(&self) -> &[Diagnostic] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn has(&self, code: &str) -> bool {
        self.entries.iter().any(|d| d.code == code)
    }

    /// Short `;`-joined code list, suitable for a CSV column.
    pub fn codes(&self) -> String {
        let mut codes: Vec<&str> = self.entries.iter().map(|d| d.code).collect();
        codes.dedup();
        codes.join(";")
    }

    pub fn extend(&mut self, other: Diagnostics) {
        self.entries.extend(other.entries);
    }
}
