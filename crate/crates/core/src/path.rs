//! Addressing for mapping endpoints.
//!
//! A reference is written `scope:path`, where `path` is a dot-separated list of
//! identifiers and at most one segment carries the list wildcard `[*]`:
//!
//! ```text
//! serviceOutput:contacts[*].contactId
//! field:tickets[*].id
//! row:lastName
//! global:currentTicketId
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scope {
    Field,
    Row,
    Global,
    ServiceInput,
    ServiceOutput,
}

impl Scope {
    pub const ALL: [Scope; 5] = [
        Scope::Field,
        Scope::Row,
        Scope::Global,
        Scope::ServiceInput,
        Scope::ServiceOutput,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scope::Field => "field",
            Scope::Row => "row",
            Scope::Global => "global",
            Scope::ServiceInput => "serviceInput",
            Scope::ServiceOutput => "serviceOutput",
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Segment {
    pub name: String,
    pub wildcard: bool,
}

impl Segment {
    pub fn plain(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            wildcard: false,
        }
    }

    pub fn list(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            wildcard: true,
        }
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if self.wildcard {
            f.write_str("[*]")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RefError {
    #[error("missing `scope:` prefix")]
    MissingScope,
    #[error("unknown scope `{0}`")]
    UnknownScope(String),
    #[error("empty path")]
    EmptyPath,
    #[error("invalid segment `{0}`")]
    BadSegment(String),
    #[error("more than one `[*]` wildcard")]
    MultipleWildcards,
}

/// Dot-separated path with at most one wildcard segment.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RefPath {
    segments: Vec<Segment>,
}

impl RefPath {
    pub fn new(segments: Vec<Segment>) -> Result<Self, RefError> {
        if segments.is_empty() {
            return Err(RefError::EmptyPath);
        }
        for s in &segments {
            if !is_identifier(&s.name) {
                return Err(RefError::BadSegment(s.to_string()));
            }
        }
        if segments.iter().filter(|s| s.wildcard).count() > 1 {
            return Err(RefError::MultipleWildcards);
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn head(&self) -> &Segment {
        &self.segments[0]
    }

    pub fn has_wildcard(&self) -> bool {
        self.segments.iter().any(|s| s.wildcard)
    }

    pub fn wildcard_index(&self) -> Option<usize> {
        self.segments.iter().position(|s| s.wildcard)
    }
}

impl fmt::Display for RefPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.segments.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for RefPath {
    type Err = RefError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err(RefError::EmptyPath);
        }
        let segments = s
            .split('.')
            .map(|raw| match raw.strip_suffix("[*]") {
                Some(name) => Segment::list(name),
                None => Segment::plain(raw),
            })
            .collect();
        RefPath::new(segments)
    }
}

/// One end of a data mapping.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct DataRef {
    pub scope: Scope,
    pub path: RefPath,
}

impl DataRef {
    pub fn new(scope: Scope, path: &str) -> Result<Self, RefError> {
        Ok(Self {
            scope,
            path: path.parse()?,
        })
    }

    /// Path with the scope name prepended, as used when addressing a
    /// scope-keyed record.
    pub fn rooted_segments(&self) -> Vec<Segment> {
        let mut out = Vec::with_capacity(self.path.segments.len() + 1);
        out.push(Segment::plain(self.scope.as_str()));
        out.extend(self.path.segments.iter().cloned());
        out
    }
}

impl fmt::Display for DataRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.scope, self.path)
    }
}

impl FromStr for DataRef {
    type Err = RefError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (scope, path) = s.split_once(':').ok_or(RefError::MissingScope)?;
        let scope = Scope::ALL
            .into_iter()
            .find(|c| c.as_str() == scope)
            .ok_or_else(|| RefError::UnknownScope(scope.to_string()))?;
        Ok(Self {
            scope,
            path: path.parse()?,
        })
    }
}

impl TryFrom<String> for DataRef {
    type Error = RefError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<DataRef> for String {
    fn from(value: DataRef) -> Self {
        value.to_string()
    }
}

/// Machine identifiers: ASCII letter or `_`, then letters, digits, `_` or `-`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_wildcard_path() {
        let r: DataRef = "serviceOutput:contacts[*].contactId".parse().unwrap();
        assert_eq!(r.scope, Scope::ServiceOutput);
        assert_eq!(r.path.wildcard_index(), Some(0));
        assert_eq!(r.to_string(), "serviceOutput:contacts[*].contactId");
    }

    #[test]
    fn rejects_two_wildcards() {
        assert_eq!("field:a[*].b[*]".parse::<DataRef>(), Err(RefError::MultipleWildcards));
    }

    #[test]
    fn rejects_bad_scope_and_segments() {
        assert!(matches!("nope:a".parse::<DataRef>(), Err(RefError::UnknownScope(_))));
        assert_eq!("a.b".parse::<DataRef>(), Err(RefError::MissingScope));
        assert!(matches!("field:a..b".parse::<DataRef>(), Err(RefError::BadSegment(_))));
        assert!(matches!("field:1a".parse::<DataRef>(), Err(RefError::BadSegment(_))));
        assert_eq!("field:".parse::<DataRef>(), Err(RefError::EmptyPath));
    }

    #[test]
    fn serde_uses_text_form() {
        let r: DataRef = serde_json::from_str("\"global:currentTicketId\"").unwrap();
        assert_eq!(serde_json::to_string(&r).unwrap(), "\"global:currentTicketId\"");
    }
}
