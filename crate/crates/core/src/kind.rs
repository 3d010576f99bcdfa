use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Semantic and UI type of a field.
///
/// The set is closed; adding a kind is a schema change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Text,
    Multiline,
    Date,
    Phone,
    Photo,
    Address,
    Number,
    Table,
    Button,
}

impl FieldKind {
    pub const ALL: [FieldKind; 9] = [
        FieldKind::Text,
        FieldKind::Multiline,
        FieldKind::Date,
        FieldKind::Phone,
        FieldKind::Photo,
        FieldKind::Address,
        FieldKind::Number,
        FieldKind::Table,
        FieldKind::Button,
    ];

    /// Kinds that hold a single data value.
    pub fn is_scalar(self) -> bool {
        !matches!(self, FieldKind::Table | FieldKind::Button)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FieldKind::Text => "text",
            FieldKind::Multiline => "multiline",
            FieldKind::Date => "date",
            FieldKind::Phone => "phone",
            FieldKind::Photo => "photo",
            FieldKind::Address => "address",
            FieldKind::Number => "number",
            FieldKind::Table => "table",
            FieldKind::Button => "button",
        }
    }

    /// The only capability a field of this kind may be linked to.
    pub fn permitted_capability(self) -> Option<Capability> {
        match self {
            FieldKind::Address => Some(Capability::Location),
            FieldKind::Phone => Some(Capability::Dialer),
            FieldKind::Photo => Some(Capability::Camera),
            _ => None,
        }
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown field kind `{0}`")]
pub struct UnknownKind(pub String);

impl FromStr for FieldKind {
    type Err = UnknownKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FieldKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| UnknownKind(s.to_string()))
    }
}

/// Device feature a field can be wired to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Capability {
    Location,
    Dialer,
    Camera,
}

impl fmt::Display for Capability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Capability::Location => "location",
            Capability::Dialer => "dialer",
            Capability::Camera => "camera",
        })
    }
}

/// Whether a value of kind `from` may flow into a slot of kind `to`.
///
/// Same-kind scalars always match. Any scalar may be displayed as text, and
/// text may feed the other free-text kinds. Nothing coerces into date, number
/// or photo, and non-scalar kinds never take part in a mapping.
pub fn compatible(from: FieldKind, to: FieldKind) -> bool {
    use FieldKind::*;
    if !from.is_scalar() || !to.is_scalar() {
        return false;
    }
    if from == to || to == Text {
        return true;
    }
    from == Text && matches!(to, Multiline | Phone | Address)
}
