//! The `.app.json` document format.
//!
//! Canonical text is UTF-8 JSON with sorted object keys, list order preserved,
//! two-space indentation, LF line endings and a trailing newline.

use serde_json::{Map, Value};

use crate::diag::{codes, Diagnostic};
use crate::kind::FieldKind;
use crate::model::Application;
use crate::path::DataRef;
use crate::structure::check_structure;

pub const APP_FILE_EXTENSION: &str = ".app.json";

/// Parses a document into a fully resolved [`Application`].
///
/// Every problem found is returned as an error diagnostic. Syntax errors carry
/// their position as `@line:column` in the diagnostic location.
pub fn parse_app(document: &str) -> Result<Application, Vec<Diagnostic>> {
    let value: Value = serde_json::from_str(document).map_err(|e| {
        vec![Diagnostic::error(
            codes::SYNTAX_ERROR,
            format!("@{}:{}", e.line(), e.column()),
            e.to_string(),
        )]
    })?;

    let mut diags = Vec::new();
    precheck(&value, &mut diags);
    if !diags.is_empty() {
        return Err(diags);
    }

    let app: Application = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let location = if path == "." {
            "/".to_string()
        } else {
            format!("/{path}")
        };
        vec![Diagnostic::error(
            codes::SCHEMA_ERROR,
            location,
            e.into_inner().to_string(),
        )]
    })?;

    let diags = check_structure(&app);
    if diags.iter().any(Diagnostic::is_error) {
        return Err(diags);
    }
    Ok(app)
}

/// Writes the canonical document for `app`.
pub fn serialize_app(app: &Application) -> String {
    let value = serde_json::to_value(app).expect("application model is always representable");
    to_canonical_json(&value)
}

/// Canonical pretty JSON: sorted keys, 2-space indent, trailing LF.
pub fn to_canonical_json(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(&sorted(value)).expect("json value serializes");
    text.push('\n');
    text
}

fn sorted(value: &Value) -> Value {
    match value {
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            let mut out = Map::new();
            for k in keys {
                out.insert(k.clone(), sorted(&map[k]));
            }
            Value::Object(out)
        }
        Value::Array(items) => Value::Array(items.iter().map(sorted).collect()),
        other => other.clone(),
    }
}

// Walks the raw tree for the two errors that deserve their own codes: unknown
// field kinds and malformed mapping references. Everything else is left to
// typed deserialization.
fn precheck(root: &Value, out: &mut Vec<Diagnostic>) {
    if let Some(globals) = root.get("globals").and_then(Value::as_array) {
        for (i, g) in globals.iter().enumerate() {
            let at = format!("/globals/{}", key_of(g, "name", i));
            check_kind(g, &at, out);
        }
    }
    let Some(forms) = root.get("forms").and_then(Value::as_array) else {
        return;
    };
    for (fi, form) in forms.iter().enumerate() {
        let form_id = key_of(form, "id", fi);
        for role in ["prepopulate", "save"] {
            if let Some(binding) = form.get(role) {
                let at = format!("/forms/{form_id}/{role}");
                for side in ["inputs", "outputs"] {
                    check_mappings(binding.get(side), &at, out);
                }
            }
        }
        let pages = form.get("pages").and_then(Value::as_array);
        for page in pages.into_iter().flatten() {
            let fields = page.get("fields").and_then(Value::as_array);
            for (i, field) in fields.into_iter().flatten().enumerate() {
                let at = format!("/forms/{form_id}/fields/{}", key_of(field, "id", i));
                check_field_value(field, &at, out);
                let columns = field.get("columns").and_then(Value::as_array);
                for (ci, column) in columns.into_iter().flatten().enumerate() {
                    let col_at = format!("{at}/columns/{}", key_of(column, "id", ci));
                    check_field_value(column, &col_at, out);
                }
            }
        }
    }
}

fn key_of(v: &Value, key: &str, index: usize) -> String {
    v.get(key)
        .and_then(Value::as_str)
        .map(str::to_string)
        .unwrap_or_else(|| index.to_string())
}

fn check_kind(v: &Value, at: &str, out: &mut Vec<Diagnostic>) {
    if let Some(kind) = v.get("kind").and_then(Value::as_str) {
        if kind.parse::<FieldKind>().is_err() {
            out.push(Diagnostic::error(
                codes::UNKNOWN_FIELD_KIND,
                at,
                format!("unknown field kind `{kind}`"),
            ));
        }
    }
}

fn check_field_value(field: &Value, at: &str, out: &mut Vec<Diagnostic>) {
    check_kind(field, at, out);
    for slot in ["rowNavigation", "navigation"] {
        if let Some(link) = field.get(slot) {
            check_mappings(link.get("mappings"), &format!("{at}/{slot}"), out);
        }
    }
}

fn check_mappings(list: Option<&Value>, at: &str, out: &mut Vec<Diagnostic>) {
    let Some(items) = list.and_then(Value::as_array) else {
        return;
    };
    for (i, m) in items.iter().enumerate() {
        for end in ["from", "to"] {
            if let Some(text) = m.get(end).and_then(Value::as_str) {
                if let Err(e) = text.parse::<DataRef>() {
                    out.push(Diagnostic::error(
                        codes::INVALID_REF,
                        format!("{at}/{i}/{end}"),
                        format!("bad reference `{text}`: {e}"),
                    ));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::error_codes;

    #[test]
    fn empty_app_needs_an_entry_form() {
        let err = parse_app(r#"{"name":"Empty","globals":[],"forms":[]}"#).unwrap_err();
        assert_eq!(error_codes(&err), vec![codes::NO_ENTRY_FORM]);
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_app("{\n  \"name\": \"x\",\n  oops\n}").unwrap_err();
        assert_eq!(err.len(), 1);
        assert_eq!(err[0].code, codes::SYNTAX_ERROR);
        assert_eq!(err[0].location, "@3:3");
    }

    #[test]
    fn unknown_kind_has_its_own_code() {
        let doc = r#"{"name":"A","globals":[],"forms":[{"id":"f","title":"F","pages":[
            {"id":"p","fields":[{"id":"x","label":"X","kind":"slider"}]}]}]}"#;
        let err = parse_app(doc).unwrap_err();
        assert_eq!(error_codes(&err), vec![codes::UNKNOWN_FIELD_KIND]);
        assert_eq!(err[0].location, "/forms/f/fields/x");
    }

    #[test]
    fn extra_top_level_key_is_a_schema_error() {
        let doc = r#"{"name":"A","version":1,"globals":[],"forms":[],"theme":"dark"}"#;
        let err = parse_app(doc).unwrap_err();
        assert_eq!(error_codes(&err), vec![codes::SCHEMA_ERROR]);
    }

    #[test]
    fn malformed_reference() {
        let doc = r#"{"name":"A","globals":[],"forms":[{"id":"f","title":"F","pages":[{"id":"p","fields":[]}],
            "save":{"serviceRef":{"systemId":"s","serviceId":"x"},"inputs":[{"from":"field:a[*].b[*]","to":"serviceInput:a"}]}}]}"#;
        let err = parse_app(doc).unwrap_err();
        assert_eq!(error_codes(&err), vec![codes::INVALID_REF]);
        assert_eq!(err[0].location, "/forms/f/save/0/from");
    }

    #[test]
    fn canonical_text_is_sorted_and_indented() {
        let text = serialize_app(&Application::blank("T"));
        assert!(text.ends_with("}\n"));
        assert!(!text.contains('\r'));
        let forms_at = text.find("\"forms\"").unwrap();
        let globals_at = text.find("\"globals\"").unwrap();
        let name_at = text.find("\"name\"").unwrap();
        let version_at = text.find("\"version\"").unwrap();
        assert!(forms_at < globals_at && globals_at < name_at && name_at < version_at);
        assert!(text.contains("\n  \"forms\""));
    }

    #[test]
    fn missing_version_defaults_to_one() {
        let app =
            parse_app(r#"{"name":"A","globals":[],"forms":[{"id":"f","title":"F","pages":[{"id":"p","fields":[]}]}]}"#)
                .unwrap();
        assert_eq!(app.version, 1);
        assert_eq!(parse_app(&serialize_app(&app)).unwrap(), app);
    }
}
