//! What a form looks like on screen versus what data it carries.

use crate::kind::FieldKind;
use crate::model::{FieldSpec, Form};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisibleField<'a> {
    pub field: &'a FieldSpec,
    /// Non-hidden columns, for tables.
    pub columns: Vec<&'a FieldSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormView<'a> {
    /// Rendered fields in page order, hidden ones left out.
    pub visible: Vec<VisibleField<'a>>,
    /// Every data-carrying path, hidden or not: `field` or `table[*].column`.
    pub data_paths: Vec<String>,
    pub save_affordance: bool,
}

/// Splits a form into its rendered view and its data payload.
pub fn project_form(form: &Form) -> FormView<'_> {
    let mut visible = Vec::new();
    let mut data_paths = Vec::new();
    for field in form.fields() {
        match field.kind {
            FieldKind::Table => {
                data_paths.extend(field.columns.iter().map(|c| format!("{}[*].{}", field.id, c.id)));
            }
            FieldKind::Button => {}
            _ => data_paths.push(field.id.clone()),
        }
        if !field.hidden {
            visible.push(VisibleField {
                field,
                columns: field.columns.iter().filter(|c| !c.hidden).collect(),
            });
        }
    }
    FormView {
        visible,
        data_paths,
        save_affordance: form.save.is_some(),
    }
}

impl FormView<'_> {
    /// Paths of everything the user can see, in the same notation as
    /// [`FormView::data_paths`].
    pub fn visible_paths(&self) -> Vec<String> {
        let mut out = Vec::new();
        for v in &self.visible {
            match v.field.kind {
                FieldKind::Table => out.extend(v.columns.iter().map(|c| format!("{}[*].{}", v.field.id, c.id))),
                FieldKind::Button => {}
                _ => out.push(v.field.id.clone()),
            }
        }
        out
    }
}
