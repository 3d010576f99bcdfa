use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// Stable diagnostic codes. Tools match on these strings, so never rename one.
pub mod codes {
    pub const SYNTAX_ERROR: &str = "SYNTAX_ERROR";
    pub const SCHEMA_ERROR: &str = "SCHEMA_ERROR";
    pub const UNKNOWN_FIELD_KIND: &str = "UNKNOWN_FIELD_KIND";
    pub const INVALID_REF: &str = "INVALID_REF";
    pub const INVALID_IDENTIFIER: &str = "INVALID_IDENTIFIER";
    pub const EMPTY_NAME: &str = "EMPTY_NAME";
    pub const NO_ENTRY_FORM: &str = "NO_ENTRY_FORM";
    pub const NO_PAGES: &str = "NO_PAGES";
    pub const DUPLICATE_FORM_ID: &str = "DUPLICATE_FORM_ID";
    pub const DUPLICATE_PAGE_ID: &str = "DUPLICATE_PAGE_ID";
    pub const DUPLICATE_FIELD_ID: &str = "DUPLICATE_FIELD_ID";
    pub const DUPLICATE_GLOBAL: &str = "DUPLICATE_GLOBAL";
    pub const NON_SCALAR_GLOBAL: &str = "NON_SCALAR_GLOBAL";
    pub const COLUMNS_KIND_MISMATCH: &str = "COLUMNS_KIND_MISMATCH";
    pub const NESTED_TABLE: &str = "NESTED_TABLE";
    pub const NAVIGATION_KIND_MISMATCH: &str = "NAVIGATION_KIND_MISMATCH";
    pub const CAPABILITY_KIND_MISMATCH: &str = "CAPABILITY_KIND_MISMATCH";
    pub const UNRESOLVED_NAV_TARGET: &str = "UNRESOLVED_NAV_TARGET";
    pub const UNRESOLVED_REF: &str = "UNRESOLVED_REF";
    pub const SCOPE_NOT_ALLOWED: &str = "SCOPE_NOT_ALLOWED";
    pub const WILDCARD_MISUSE: &str = "WILDCARD_MISUSE";
    pub const TYPE_MISMATCH: &str = "TYPE_MISMATCH";
    pub const UNKNOWN_SERVICE: &str = "UNKNOWN_SERVICE";
    pub const UNCHECKED_SERVICE: &str = "UNCHECKED_SERVICE";
    pub const UNKNOWN_PARAMETER: &str = "UNKNOWN_PARAMETER";
    pub const MISSING_REQUIRED_INPUT: &str = "MISSING_REQUIRED_INPUT";
    pub const REPEATING_TO_SCALAR: &str = "REPEATING_TO_SCALAR";
    pub const SCALAR_TO_REPEATING: &str = "SCALAR_TO_REPEATING";
    pub const TOO_MANY_VISIBLE_COLUMNS: &str = "TOO_MANY_VISIBLE_COLUMNS";
    pub const UNUSED_GLOBAL: &str = "UNUSED_GLOBAL";
    pub const TARGET_NOT_FOUND: &str = "TARGET_NOT_FOUND";
    pub const INVALID_PAYLOAD: &str = "INVALID_PAYLOAD";
}

/// A finding about a model. Errors block deployment, warnings do not.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: String,
    /// Slash-separated path into the model, e.g. `/forms/summary/fields/date`.
    pub location: String,
    pub message: String,
}

impl Diagnostic {
    pub fn error(code: &str, location: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            code: code.to_string(),
            location: location.into(),
            message: message.into(),
        }
    }

    pub fn warning(code: &str, location: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            code: code.to_string(),
            location: location.into(),
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// Machine line format: `severity code path message`.
    pub fn to_machine_line(&self) -> String {
        let location = if self.location.is_empty() { "/" } else { &self.location };
        format!(
            "{} {} {} {}",
            self.severity,
            self.code,
            location,
            self.message.replace('\n', " ")
        )
    }

    /// Inverse of [`Diagnostic::to_machine_line`].
    pub fn from_machine_line(line: &str) -> Option<Self> {
        let mut parts = line.splitn(4, ' ');
        let severity = match parts.next()? {
            "error" => Severity::Error,
            "warning" => Severity::Warning,
            _ => return None,
        };
        let code = parts.next()?.to_string();
        let location = parts.next()?.to_string();
        let message = parts.next().unwrap_or_default().to_string();
        Some(Self {
            severity,
            code,
            location,
            message,
        })
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}[{}] {}: {}",
            self.severity, self.code, self.location, self.message
        )
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}

pub fn error_codes(diags: &[Diagnostic]) -> Vec<&str> {
    diags.iter().filter(|d| d.is_error()).map(|d| d.code.as_str()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn machine_line_parses_back() {
        let d = Diagnostic::error(
            codes::DUPLICATE_FIELD_ID,
            "/forms/summary",
            "field id `date` appears twice",
        );
        let line = d.to_machine_line();
        assert_eq!(
            line,
            "error DUPLICATE_FIELD_ID /forms/summary field id `date` appears twice"
        );
        assert_eq!(Diagnostic::from_machine_line(&line), Some(d));
    }

    #[test]
    fn empty_location_prints_root() {
        let d = Diagnostic::warning(codes::UNUSED_GLOBAL, "", "x");
        assert_eq!(d.to_machine_line(), "warning UNUSED_GLOBAL / x");
    }
}
