use crate::binding::{check_binding, check_navigation};
use crate::descriptor::ServiceDescriptor;
use crate::diag::{codes, Diagnostic};
use crate::model::{loc, Application};
use crate::structure::check_structure;

/// Full semantic check of a parsed application against a service catalogue.
///
/// Bindings to a system that has no descriptors in `catalogue` at all are
/// reported as `UNCHECKED_SERVICE` warnings; a system that is known but lacks
/// the named service is an `UNKNOWN_SERVICE` error.
pub fn validate(app: &Application, catalogue: &[ServiceDescriptor]) -> Vec<Diagnostic> {
    let mut out = check_structure(app);

    for form in &app.forms {
        check_navigation(app, form, &mut out);
    }

    for (form, role, binding) in app.bindings() {
        let sref = &binding.service_ref;
        let descriptor = catalogue
            .iter()
            .find(|d| d.system_id == sref.system_id && d.service_id == sref.service_id);
        match descriptor {
            Some(d) => out.extend(check_binding(app, form, role, binding, d)),
            None if catalogue.iter().any(|d| d.system_id == sref.system_id) => {
                out.push(Diagnostic::error(
                    codes::UNKNOWN_SERVICE,
                    loc::binding(&form.id, role),
                    format!("system `{}` offers no service `{}`", sref.system_id, sref.service_id),
                ));
            }
            None => out.push(Diagnostic::warning(
                codes::UNCHECKED_SERVICE,
                loc::binding(&form.id, role),
                format!(
                    "system `{}` not discovered; binding to {sref} not type-checked",
                    sref.system_id
                ),
            )),
        }
    }
    out
}

/// Parses and validates a document in one go: the diagnostics a user sees for
/// a file.
pub fn check_document(document: &str, catalogue: &[ServiceDescriptor]) -> Vec<Diagnostic> {
    match crate::dsl::parse_app(document) {
        Ok(app) => validate(&app, catalogue),
        Err(diags) => diags,
    }
}
