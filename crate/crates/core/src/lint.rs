use std::collections::HashSet;

use crate::diag::{codes, Diagnostic};
use crate::kind::FieldKind;
use crate::model::{loc, Application};
use crate::path::Scope;

/// Most columns a phone screen shows side by side.
pub const MAX_VISIBLE_COLUMNS: usize = 2;

/// Style warnings for an application that already validates.
pub fn lint(app: &Application) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    for form in &app.forms {
        for table in form.fields().filter(|f| f.kind == FieldKind::Table) {
            let visible = table.columns.iter().filter(|c| !c.hidden).count();
            if visible > MAX_VISIBLE_COLUMNS {
                out.push(Diagnostic::warning(
                    codes::TOO_MANY_VISIBLE_COLUMNS,
                    loc::field(&form.id, &table.id),
                    format!("table shows {visible} columns; hide all but {MAX_VISIBLE_COLUMNS} to fit the screen"),
                ));
            }
        }
    }

    let mut read = HashSet::new();
    let nav_mappings = app
        .forms
        .iter()
        .flat_map(|f| f.navigations())
        .flat_map(|(_, link)| link.mappings.iter());
    let binding_mappings = app.bindings().flat_map(|(_, _, b)| b.inputs.iter());
    for m in nav_mappings.chain(binding_mappings) {
        if m.from.scope == Scope::Global {
            read.insert(m.from.path.head().name.clone());
        }
    }
    for g in app.globals.iter().filter(|g| !read.contains(&g.name)) {
        out.push(Diagnostic::warning(
            codes::UNUSED_GLOBAL,
            loc::global(&g.name),
            format!("global `{}` is never read", g.name),
        ));
    }
    out
}
