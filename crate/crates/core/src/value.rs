use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use crate::kind::FieldKind;

/// A field value tagged with its data kind.
///
/// Numbers keep their exact decimal text. `Absent` is distinct from empty text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Value {
    Text(String),
    /// ISO-8601 calendar date, `YYYY-MM-DD`.
    Date(String),
    Number(String),
    /// Opaque content reference.
    Photo(String),
    #[default]
    Absent,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("`{text}` is not a valid {kind} value")]
pub struct KindMismatch {
    pub kind: FieldKind,
    pub text: String,
}

impl Value {
    /// Interprets `text` as a value for a field of `kind`.
    pub fn parse(kind: FieldKind, text: &str) -> Result<Value, KindMismatch> {
        let bad = || KindMismatch {
            kind,
            text: text.to_string(),
        };
        match kind {
            FieldKind::Text | FieldKind::Multiline | FieldKind::Phone | FieldKind::Address => {
                Ok(Value::Text(text.to_string()))
            }
            FieldKind::Date if is_iso_date(text) => Ok(Value::Date(text.to_string())),
            FieldKind::Number if is_decimal(text) => Ok(Value::Number(text.to_string())),
            FieldKind::Photo if !text.is_empty() => Ok(Value::Photo(text.to_string())),
            _ => Err(bad()),
        }
    }

    /// Interprets a JSON scalar for a field of `kind`; `null` is absent.
    pub fn from_json(kind: FieldKind, json: &Json) -> Result<Value, KindMismatch> {
        match json {
            Json::Null => Ok(Value::Absent),
            Json::String(s) => Value::parse(kind, s),
            Json::Number(n) => Value::parse(kind, &n.to_string()),
            Json::Bool(b) => Value::parse(kind, if *b { "true" } else { "false" }),
            other => Err(KindMismatch {
                kind,
                text: other.to_string(),
            }),
        }
    }

    /// Wire form used inside message records: the bare text, or `null`.
    pub fn to_json(&self) -> Json {
        match self.as_text() {
            Some(s) => Json::String(s.to_string()),
            None => Json::Null,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) | Value::Date(s) | Value::Number(s) | Value::Photo(s) => Some(s),
            Value::Absent => None,
        }
    }

    pub fn is_absent(&self) -> bool {
        matches!(self, Value::Absent)
    }

    /// Whether this value may be stored in a field of `kind`.
    pub fn fits(&self, kind: FieldKind) -> bool {
        match self {
            Value::Absent => kind.is_scalar(),
            Value::Text(_) => matches!(
                kind,
                FieldKind::Text | FieldKind::Multiline | FieldKind::Phone | FieldKind::Address
            ),
            Value::Date(_) => kind == FieldKind::Date,
            Value::Number(_) => kind == FieldKind::Number,
            Value::Photo(_) => kind == FieldKind::Photo,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_text() {
            Some(s) => f.write_str(s),
            None => f.write_str("<absent>"),
        }
    }
}

fn is_iso_date(s: &str) -> bool {
    s.len() == 10 && NaiveDate::parse_from_str(s, "%Y-%m-%d").is_ok()
}

fn is_decimal(s: &str) -> bool {
    let digits = s.strip_prefix('-').unwrap_or(s);
    let (int, frac) = match digits.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (digits, None),
    };
    let all_digits = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
    all_digits(int) && frac.is_none_or(all_digits)
}
