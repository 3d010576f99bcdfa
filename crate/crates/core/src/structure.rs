//! Shape checks that need nothing but the model itself.
//!
//! These run on every parse and every edit. Cross-reference checks (navigation
//! targets, mapping endpoints, service bindings) live in [`crate::validate`].

use std::collections::HashSet;

use crate::diag::{codes, Diagnostic};
use crate::kind::FieldKind;
use crate::model::{loc, Application, FieldSpec, NavSource};
use crate::path::is_identifier;

pub fn check_structure(app: &Application) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    if app.name.trim().is_empty() {
        out.push(Diagnostic::error(
            codes::EMPTY_NAME,
            loc::app(),
            "application name is empty",
        ));
    }
    if app.forms.is_empty() {
        out.push(Diagnostic::error(
            codes::NO_ENTRY_FORM,
            loc::app(),
            "application has no forms, so there is no entry form",
        ));
    }

    let mut globals = HashSet::new();
    for g in &app.globals {
        let at = loc::global(&g.name);
        check_id(&g.name, &at, &mut out);
        if !globals.insert(g.name.as_str()) {
            out.push(Diagnostic::error(
                codes::DUPLICATE_GLOBAL,
                at.clone(),
                format!("global `{}` declared twice", g.name),
            ));
        }
        if !g.kind.is_scalar() {
            out.push(Diagnostic::error(
                codes::NON_SCALAR_GLOBAL,
                at,
                format!("global `{}` has non-scalar kind {}", g.name, g.kind),
            ));
        }
    }

    let mut forms = HashSet::new();
    for form in &app.forms {
        let at = loc::form(&form.id);
        check_id(&form.id, &at, &mut out);
        if !forms.insert(form.id.as_str()) {
            out.push(Diagnostic::error(
                codes::DUPLICATE_FORM_ID,
                at.clone(),
                format!("form id `{}` appears twice", form.id),
            ));
        }
        if form.pages.is_empty() {
            out.push(Diagnostic::error(codes::NO_PAGES, at.clone(), "form has no pages"));
        }

        let mut pages = HashSet::new();
        let mut fields = HashSet::new();
        for page in &form.pages {
            check_id(&page.id, &loc::page(&form.id, &page.id), &mut out);
            if !pages.insert(page.id.as_str()) {
                out.push(Diagnostic::error(
                    codes::DUPLICATE_PAGE_ID,
                    at.clone(),
                    format!("page id `{}` appears twice", page.id),
                ));
            }
            for field in &page.fields {
                if !fields.insert(field.id.as_str()) {
                    out.push(Diagnostic::error(
                        codes::DUPLICATE_FIELD_ID,
                        at.clone(),
                        format!("field id `{}` appears twice", field.id),
                    ));
                }
                check_field(field, &loc::field(&form.id, &field.id), false, &mut out);
                let mut columns = HashSet::new();
                for column in &field.columns {
                    let col_at = loc::column(&form.id, &field.id, &column.id);
                    if !columns.insert(column.id.as_str()) {
                        out.push(Diagnostic::error(
                            codes::DUPLICATE_FIELD_ID,
                            loc::field(&form.id, &field.id),
                            format!("column id `{}` appears twice", column.id),
                        ));
                    }
                    check_field(column, &col_at, true, &mut out);
                }
            }
        }
    }
    out
}

fn check_id(id: &str, at: &str, out: &mut Vec<Diagnostic>) {
    if !is_identifier(id) {
        out.push(Diagnostic::error(
            codes::INVALID_IDENTIFIER,
            at,
            format!("`{id}` is not a valid identifier"),
        ));
    }
}

fn check_field(field: &FieldSpec, at: &str, is_column: bool, out: &mut Vec<Diagnostic>) {
    check_id(&field.id, at, out);

    if is_column {
        if !field.kind.is_scalar() {
            out.push(Diagnostic::error(
                codes::NESTED_TABLE,
                at,
                format!("table columns must be scalar, found {}", field.kind),
            ));
        }
    } else {
        let is_table = field.kind == FieldKind::Table;
        if is_table == field.columns.is_empty() {
            let msg = if is_table {
                "table field has no columns".to_string()
            } else {
                format!("{} field declares table columns", field.kind)
            };
            out.push(Diagnostic::error(codes::COLUMNS_KIND_MISMATCH, at, msg));
        }
    }

    let row_ok = field
        .row_navigation
        .as_ref()
        .is_none_or(|l| !is_column && field.kind == FieldKind::Table && l.source_kind == NavSource::TableRow);
    let button_ok = field
        .navigation
        .as_ref()
        .is_none_or(|l| !is_column && field.kind == FieldKind::Button && l.source_kind == NavSource::Button);
    if !row_ok || !button_ok {
        out.push(Diagnostic::error(
            codes::NAVIGATION_KIND_MISMATCH,
            at,
            format!(
                "navigation is allowed only as tableRow on tables and button on buttons, not on this {}",
                field.kind
            ),
        ));
    }

    if let Some(cap) = field.capability {
        if field.kind.permitted_capability() != Some(cap) {
            out.push(Diagnostic::error(
                codes::CAPABILITY_KIND_MISMATCH,
                at,
                format!("{} field cannot use the {cap} capability", field.kind),
            ));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::error_codes;
    use crate::kind::Capability;
    use crate::model::{Form, GlobalVariable, NavigationLink};

    fn one_field(field: FieldSpec) -> Application {
        let mut app = Application::blank("T");
        app.forms[0].pages[0].fields.push(field);
        app
    }

    #[test]
    fn blank_app_is_clean() {
        assert!(check_structure(&Application::blank("T")).is_empty());
    }

    #[test]
    fn duplicate_field_across_pages() {
        let mut app = Application::blank("T");
        let form = &mut app.forms[0];
        form.pages.push(crate::model::Page::new("page2"));
        form.pages[0]
            .fields
            .push(FieldSpec::new("date", "Date", FieldKind::Date));
        form.pages[1]
            .fields
            .push(FieldSpec::new("date", "Date", FieldKind::Date));
        let diags = check_structure(&app);
        assert_eq!(error_codes(&diags), vec![codes::DUPLICATE_FIELD_ID]);
        assert_eq!(diags[0].location, "/forms/main");
    }

    #[test]
    fn columns_only_on_tables() {
        let text_with_columns =
            FieldSpec::new("a", "A", FieldKind::Text).with_columns(vec![FieldSpec::new("c", "C", FieldKind::Text)]);
        assert_eq!(
            error_codes(&check_structure(&one_field(text_with_columns))),
            vec![codes::COLUMNS_KIND_MISMATCH]
        );
        let bare_table = FieldSpec::new("t", "T", FieldKind::Table);
        assert_eq!(
            error_codes(&check_structure(&one_field(bare_table))),
            vec![codes::COLUMNS_KIND_MISMATCH]
        );
    }

    #[test]
    fn capability_must_match_kind() {
        for kind in FieldKind::ALL {
            for cap in [Capability::Location, Capability::Dialer, Capability::Camera] {
                let mut f = FieldSpec::new("f", "F", kind).with_capability(cap);
                if kind == FieldKind::Table {
                    f.columns.push(FieldSpec::new("c", "C", FieldKind::Text));
                }
                let codes_found = error_codes(&check_structure(&one_field(f))).len();
                let allowed = kind.permitted_capability() == Some(cap);
                assert_eq!(codes_found == 0, allowed, "{kind} + {cap}");
            }
        }
    }

    #[test]
    fn row_navigation_only_on_tables() {
        let mut f = FieldSpec::new("b", "B", FieldKind::Button);
        f.row_navigation = Some(NavigationLink {
            source_kind: NavSource::TableRow,
            target: "main".into(),
            mappings: vec![],
        });
        assert_eq!(
            error_codes(&check_structure(&one_field(f))),
            vec![codes::NAVIGATION_KIND_MISMATCH]
        );
    }

    #[test]
    fn globals_must_be_scalar_and_unique() {
        let mut app = Application::blank("T");
        app.globals.push(GlobalVariable {
            name: "g".into(),
            kind: FieldKind::Text,
        });
        app.globals.push(GlobalVariable {
            name: "g".into(),
            kind: FieldKind::Table,
        });
        let diags = check_structure(&app);
        assert_eq!(
            error_codes(&diags),
            vec![codes::DUPLICATE_GLOBAL, codes::NON_SCALAR_GLOBAL]
        );
    }

    #[test]
    fn duplicate_forms_and_no_pages() {
        let mut app = Application::blank("T");
        let mut dup = Form::new("main", "Again");
        dup.pages.clear();
        app.forms.push(dup);
        assert_eq!(
            error_codes(&check_structure(&app)),
            vec![codes::DUPLICATE_FORM_ID, codes::NO_PAGES]
        );
    }
}
