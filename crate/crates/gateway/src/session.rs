//! Per-user runtime state and the screen view derived from it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value as Json};

use screenforge_core::kind::{Capability, FieldKind};
use screenforge_core::model::{Application, Form};
use screenforge_core::projection::project_form;
use screenforge_core::{Diagnostic, Value};

pub type Row = BTreeMap<String, Value>;

/// Everything one user has done in one running app.
///
/// `field_values` is keyed `form.field` and `table_rows` `form.table`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Session {
    pub session_id: String,
    pub bundle_id: String,
    pub current_form: String,
    pub field_values: BTreeMap<String, Value>,
    pub table_rows: BTreeMap<String, Vec<Row>>,
    pub globals: BTreeMap<String, Value>,
    /// Forms in the order they were opened.
    pub history: Vec<String>,
    /// Diagnostics of the latest operation.
    pub diagnostics: Vec<Diagnostic>,
}

impl Session {
    pub fn new(session_id: String, bundle_id: String) -> Self {
        Self {
            session_id,
            bundle_id,
            current_form: String::new(),
            field_values: BTreeMap::new(),
            table_rows: BTreeMap::new(),
            globals: BTreeMap::new(),
            history: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    pub fn key(form: &str, field: &str) -> String {
        format!("{form}.{field}")
    }

    pub fn value(&self, form: &str, field: &str) -> &Value {
        static ABSENT: Value = Value::Absent;
        self.field_values.get(&Self::key(form, field)).unwrap_or(&ABSENT)
    }

    pub fn rows(&self, form: &str, table: &str) -> &[Row] {
        self.table_rows
            .get(&Self::key(form, table))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Drops every value of `form`.
    pub fn reset_form(&mut self, form: &str) {
        let prefix = format!("{form}.");
        self.field_values.retain(|k, _| !k.starts_with(&prefix));
        self.table_rows.retain(|k, _| !k.starts_with(&prefix));
    }

    /// How many times `form` has been opened.
    pub fn opens(&self, form: &str) -> usize {
        self.history.iter().filter(|f| *f == form).count()
    }

    /// Message-side view of the session for `form`:
    /// `{"field": {...}, "global": {...}}` with absent values left out.
    pub fn record(&self, form: &Form) -> Map<String, Json> {
        let mut fields = Map::new();
        for f in form.fields() {
            match f.kind {
                FieldKind::Table => {
                    let rows: Vec<Json> = self.rows(&form.id, &f.id).iter().map(row_json).collect();
                    fields.insert(f.id.clone(), Json::Array(rows));
                }
                FieldKind::Button => {}
                _ => {
                    let v = self.value(&form.id, &f.id);
                    if !v.is_absent() {
                        fields.insert(f.id.clone(), v.to_json());
                    }
                }
            }
        }
        let globals: Map<String, Json> = self
            .globals
            .iter()
            .filter(|(_, v)| !v.is_absent())
            .map(|(k, v)| (k.clone(), v.to_json()))
            .collect();
        let mut out = Map::new();
        out.insert("field".into(), Json::Object(fields));
        out.insert("global".into(), Json::Object(globals));
        out
    }
}

pub fn row_json(row: &Row) -> Json {
    Json::Object(
        row.iter()
            .filter(|(_, v)| !v.is_absent())
            .map(|(k, v)| (k.clone(), v.to_json()))
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FieldState {
    pub id: String,
    pub label: String,
    pub kind: FieldKind,
    pub editable: bool,
    pub value: Json,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capability: Option<Capability>,
}

/// What a client renders for the current form. Hidden fields and columns are
/// left out; [`Session`] still holds their values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FormState {
    pub form_id: String,
    pub title: String,
    pub save_enabled: bool,
    pub fields: Vec<FieldState>,
    pub tables: BTreeMap<String, Vec<BTreeMap<String, Json>>>,
    pub diagnostics: Vec<Diagnostic>,
}

impl FormState {
    pub fn field(&self, id: &str) -> Option<&FieldState> {
        self.fields.iter().find(|f| f.id == id)
    }

    pub fn build(app: &Application, session: &Session) -> FormState {
        let form = app.form(&session.current_form).expect("current form exists");
        let view = project_form(form);
        let mut fields = Vec::new();
        let mut tables = BTreeMap::new();
        for v in &view.visible {
            let f = v.field;
            if f.kind == FieldKind::Table {
                let rows = session
                    .rows(&form.id, &f.id)
                    .iter()
                    .map(|row| {
                        v.columns
                            .iter()
                            .map(|c| (c.id.clone(), row.get(&c.id).map(Value::to_json).unwrap_or(Json::Null)))
                            .collect()
                    })
                    .collect();
                tables.insert(f.id.clone(), rows);
            } else {
                fields.push(FieldState {
                    id: f.id.clone(),
                    label: f.label.clone(),
                    kind: f.kind,
                    editable: f.editable,
                    value: session.value(&form.id, &f.id).to_json(),
                    capability: f.capability,
                });
            }
        }
        FormState {
            form_id: form.id.clone(),
            title: form.title.clone(),
            save_enabled: view.save_affordance,
            fields,
            tables,
            diagnostics: session.diagnostics.clone(),
        }
    }
}

/// Outcome of a successful save.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SaveResult {
    pub form_id: String,
    /// The backend's acknowledgment record.
    pub ack: Json,
    pub diagnostics: Vec<Diagnostic>,
}
