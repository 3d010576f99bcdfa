//! Type checking of data mappings: service bindings and navigation links.

use crate::descriptor::{ParamKind, ParameterSpec, ServiceDescriptor};
use crate::diag::{codes, Diagnostic};
use crate::kind::{compatible, FieldKind};
use crate::model::{loc, Application, BindingRole, DataMapping, FieldSpec, Form, NavSource, ServiceBinding};
use crate::path::{DataRef, RefPath, Scope};

/// What a reference points at once resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub kind: FieldKind,
    /// True for table columns and fields of list parameters (`x[*].y`).
    pub repeating: bool,
}

impl Slot {
    fn scalar(kind: FieldKind) -> Self {
        Self { kind, repeating: false }
    }

    fn repeating(kind: FieldKind) -> Self {
        Self { kind, repeating: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolveError {
    pub code: &'static str,
    pub message: String,
}

impl ResolveError {
    fn new(code: &'static str, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

/// Everything a reference may be resolved against, for one side of a mapping.
#[derive(Clone, Copy)]
pub struct Namespace<'a> {
    pub app: &'a Application,
    pub form: Option<&'a Form>,
    /// Table whose selected row `row:` references read from.
    pub row_table: Option<&'a FieldSpec>,
    pub service_inputs: Option<&'a [ParameterSpec]>,
    pub service_outputs: Option<&'a [ParameterSpec]>,
    pub allowed: &'a [Scope],
}

impl Namespace<'_> {
    pub fn resolve(&self, r: &DataRef) -> Result<Slot, ResolveError> {
        if !self.allowed.contains(&r.scope) {
            return Err(ResolveError::new(
                codes::SCOPE_NOT_ALLOWED,
                format!("`{r}`: scope {} is not allowed here", r.scope),
            ));
        }
        match r.scope {
            Scope::Field => resolve_field(self.form.expect("field scope needs a form"), &r.path),
            Scope::Global => resolve_global(self.app, &r.path),
            Scope::Row => resolve_row(self.row_table, &r.path),
            Scope::ServiceInput => resolve_param(self.service_inputs.unwrap_or(&[]), &r.path),
            Scope::ServiceOutput => resolve_param(self.service_outputs.unwrap_or(&[]), &r.path),
        }
    }
}

fn unresolved(path: &RefPath, what: &str) -> ResolveError {
    ResolveError::new(codes::UNRESOLVED_REF, format!("`{path}` does not name {what}"))
}

fn resolve_field(form: &Form, path: &RefPath) -> Result<Slot, ResolveError> {
    let segs = path.segments();
    let head = &segs[0];
    let field = form
        .field(&head.name)
        .ok_or_else(|| unresolved(path, &format!("a field of form `{}`", form.id)))?;
    match (field.kind, segs.len(), head.wildcard) {
        (FieldKind::Table, 2, true) if !segs[1].wildcard => {
            let column = field
                .column(&segs[1].name)
                .ok_or_else(|| unresolved(path, &format!("a column of table `{}`", field.id)))?;
            Ok(Slot::repeating(column.kind))
        }
        (FieldKind::Table, _, _) => Err(ResolveError::new(
            codes::WILDCARD_MISUSE,
            format!("`{path}`: address a table column as `{}[*].<column>`", field.id),
        )),
        (_, _, true) => Err(ResolveError::new(
            codes::WILDCARD_MISUSE,
            format!("`{path}`: wildcard on non-table field `{}`", field.id),
        )),
        (FieldKind::Button, _, _) => Err(unresolved(path, "a data field")),
        (kind, 1, false) => Ok(Slot::scalar(kind)),
        _ => Err(unresolved(path, "a field")),
    }
}

fn resolve_global(app: &Application, path: &RefPath) -> Result<Slot, ResolveError> {
    match path.segments() {
        [seg] if !seg.wildcard => app
            .global(&seg.name)
            .map(|g| Slot::scalar(g.kind))
            .ok_or_else(|| unresolved(path, "a global")),
        [seg] => Err(ResolveError::new(
            codes::WILDCARD_MISUSE,
            format!("global `{}` cannot repeat", seg.name),
        )),
        _ => Err(unresolved(path, "a global")),
    }
}

fn resolve_row(table: Option<&FieldSpec>, path: &RefPath) -> Result<Slot, ResolveError> {
    let table = table
        .ok_or_else(|| ResolveError::new(codes::SCOPE_NOT_ALLOWED, "`row:` is only available to table-row links"))?;
    match path.segments() {
        [seg] if !seg.wildcard => table
            .column(&seg.name)
            .map(|c| Slot::scalar(c.kind))
            .ok_or_else(|| unresolved(path, &format!("a column of table `{}`", table.id))),
        _ => Err(ResolveError::new(
            codes::WILDCARD_MISUSE,
            format!("`{path}`: a row reference names exactly one column"),
        )),
    }
}

fn resolve_param(params: &[ParameterSpec], path: &RefPath) -> Result<Slot, ResolveError> {
    let segs = path.segments();
    let head = &segs[0];
    let param = params.iter().find(|p| p.name == head.name).ok_or_else(|| {
        ResolveError::new(
            codes::UNKNOWN_PARAMETER,
            format!("service has no parameter `{}`", head.name),
        )
    })?;
    match (&param.kind, segs.len(), head.wildcard) {
        (ParamKind::Scalar(kind), 1, false) => Ok(Slot::scalar(*kind)),
        (ParamKind::Scalar(_), _, _) => Err(ResolveError::new(
            codes::WILDCARD_MISUSE,
            format!("`{path}`: parameter `{}` is scalar", param.name),
        )),
        (ParamKind::List(_), 2, true) if !segs[1].wildcard => param
            .field(&segs[1].name)
            .map(|f| match f.kind {
                ParamKind::Scalar(k) => Slot::repeating(k),
                ParamKind::List(_) => unreachable!("descriptors never nest lists"),
            })
            .ok_or_else(|| {
                ResolveError::new(
                    codes::UNKNOWN_PARAMETER,
                    format!("list `{}` has no field `{}`", param.name, segs[1].name),
                )
            }),
        (ParamKind::List(_), _, _) => Err(ResolveError::new(
            codes::WILDCARD_MISUSE,
            format!("`{path}`: address list fields as `{}[*].<field>`", param.name),
        )),
    }
}

/// Checks one mapping, resolving `from` in `source` and `to` in `dest`.
pub fn check_mapping(
    mapping: &DataMapping,
    source: &Namespace<'_>,
    dest: &Namespace<'_>,
    at: &str,
    out: &mut Vec<Diagnostic>,
) -> Option<(Slot, Slot)> {
    let from = source.resolve(&mapping.from);
    let to = dest.resolve(&mapping.to);
    let (from, to) = match (from, to) {
        (Ok(f), Ok(t)) => (f, t),
        (f, t) => {
            for (e, end) in [(f.err(), "from"), (t.err(), "to")] {
                if let Some(e) = e {
                    out.push(Diagnostic::error(e.code, format!("{at}/{end}"), e.message));
                }
            }
            return None;
        }
    };
    if from.repeating && !to.repeating {
        out.push(Diagnostic::error(
            codes::REPEATING_TO_SCALAR,
            at,
            format!("repeating `{}` mapped to single-valued `{}`", mapping.from, mapping.to),
        ));
    } else if !from.repeating && to.repeating {
        out.push(Diagnostic::error(
            codes::SCALAR_TO_REPEATING,
            at,
            format!("single value `{}` mapped to repeating `{}`", mapping.from, mapping.to),
        ));
    } else if !compatible(from.kind, to.kind) {
        out.push(Diagnostic::error(
            codes::TYPE_MISMATCH,
            at,
            format!(
                "`{}` ({}) cannot flow into `{}` ({})",
                mapping.from, from.kind, mapping.to, to.kind
            ),
        ));
    } else {
        return Some((from, to));
    }
    None
}

/// Type checks a form's binding against the descriptor it names.
pub fn check_binding(
    app: &Application,
    form: &Form,
    role: BindingRole,
    binding: &ServiceBinding,
    descriptor: &ServiceDescriptor,
) -> Vec<Diagnostic> {
    let at = loc::binding(&form.id, role);
    let mut out = Vec::new();

    let app_side = Namespace {
        app,
        form: Some(form),
        row_table: None,
        service_inputs: None,
        service_outputs: None,
        allowed: &[Scope::Field, Scope::Global],
    };
    let inputs = Namespace {
        service_inputs: Some(&descriptor.inputs),
        allowed: &[Scope::ServiceInput],
        ..app_side
    };
    let outputs = Namespace {
        service_outputs: Some(&descriptor.outputs),
        allowed: &[Scope::ServiceOutput],
        ..app_side
    };

    for (i, m) in binding.inputs.iter().enumerate() {
        check_mapping(m, &app_side, &inputs, &format!("{at}/inputs/{i}"), &mut out);
    }
    for (i, m) in binding.outputs.iter().enumerate() {
        check_mapping(m, &outputs, &app_side, &format!("{at}/outputs/{i}"), &mut out);
    }

    for param in descriptor.inputs.iter().filter(|p| p.required) {
        let covered = binding
            .inputs
            .iter()
            .any(|m| m.to.scope == Scope::ServiceInput && m.to.path.head().name == param.name);
        if !covered {
            out.push(Diagnostic::error(
                codes::MISSING_REQUIRED_INPUT,
                at.clone(),
                format!(
                    "required input `{}` of {} is not mapped",
                    param.name, descriptor.service_id
                ),
            ));
        }
    }
    out
}

/// Checks every navigation link declared on `form`.
pub fn check_navigation(app: &Application, form: &Form, out: &mut Vec<Diagnostic>) {
    for (field, link) in form.navigations() {
        let at = format!("{}/navigation", loc::field(&form.id, &field.id));
        let Some(target) = app.form(&link.target) else {
            out.push(Diagnostic::error(
                codes::UNRESOLVED_NAV_TARGET,
                at,
                format!("navigation target `{}` is not a form", link.target),
            ));
            continue;
        };
        let source_scopes: &[Scope] = match link.source_kind {
            NavSource::TableRow => &[Scope::Field, Scope::Row, Scope::Global],
            NavSource::Button => &[Scope::Field, Scope::Global],
        };
        let source = Namespace {
            app,
            form: Some(form),
            row_table: (link.source_kind == NavSource::TableRow).then_some(field),
            service_inputs: None,
            service_outputs: None,
            allowed: source_scopes,
        };
        let dest = Namespace {
            form: Some(target),
            row_table: None,
            allowed: &[Scope::Field, Scope::Global],
            ..source
        };
        for (i, m) in link.mappings.iter().enumerate() {
            check_mapping(m, &source, &dest, &format!("{at}/{i}"), out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptor::ParameterSpec;
    use crate::descriptor::Protocol;
    use crate::diag::error_codes;
    use crate::model::ServiceRef;

    fn schedule_app() -> Application {
        let mut app = Application::blank("T");
        app.forms[0].pages[0].fields.push(
            FieldSpec::new("tickets", "Tickets", FieldKind::Table).with_columns(vec![
                FieldSpec::new("id", "ID", FieldKind::Text).hidden(),
                FieldSpec::new("lastName", "Last Name", FieldKind::Text),
                FieldSpec::new("date", "Date", FieldKind::Date),
            ]),
        );
        app.forms[0].pages[0]
            .fields
            .push(FieldSpec::new("name", "Name", FieldKind::Text));
        app.forms[0].pages[0]
            .fields
            .push(FieldSpec::new("when", "When", FieldKind::Date));
        app
    }

    fn descriptor() -> ServiceDescriptor {
        ServiceDescriptor {
            system_id: "sys".into(),
            service_id: "svc".into(),
            name: "svc".into(),
            description: String::new(),
            protocol: Protocol::HttpJson,
            invocation_path: "/invoke/svc".into(),
            inputs: vec![ParameterSpec::scalar("ticketId", FieldKind::Text, true)],
            outputs: vec![
                ParameterSpec::list(
                    "contacts",
                    vec![
                        ParameterSpec::scalar("contactId", FieldKind::Text, true),
                        ParameterSpec::scalar("lastName", FieldKind::Text, true),
                    ],
                ),
                ParameterSpec::scalar("status", FieldKind::Text, false),
            ],
        }
    }

    fn binding(inputs: Vec<DataMapping>, outputs: Vec<DataMapping>) -> ServiceBinding {
        ServiceBinding {
            service_ref: ServiceRef {
                system_id: "sys".into(),
                service_id: "svc".into(),
            },
            inputs,
            outputs,
        }
    }

    fn check(b: &ServiceBinding) -> Vec<Diagnostic> {
        let app = schedule_app();
        check_binding(&app, &app.forms[0], BindingRole::Prepopulate, b, &descriptor())
    }

    #[test]
    fn list_output_into_table_column_is_fine() {
        let b = binding(
            vec![DataMapping::parse("field:name", "serviceInput:ticketId")],
            vec![DataMapping::parse(
                "serviceOutput:contacts[*].contactId",
                "field:tickets[*].id",
            )],
        );
        assert!(check(&b).is_empty(), "{:?}", check(&b));
    }

    #[test]
    fn unmapped_required_input() {
        let b = binding(vec![], vec![]);
        assert_eq!(error_codes(&check(&b)), vec![codes::MISSING_REQUIRED_INPUT]);
    }

    #[test]
    fn list_output_into_scalar_field() {
        let b = binding(
            vec![DataMapping::parse("field:name", "serviceInput:ticketId")],
            vec![DataMapping::parse("serviceOutput:contacts[*].lastName", "field:name")],
        );
        assert_eq!(error_codes(&check(&b)), vec![codes::REPEATING_TO_SCALAR]);
    }

    #[test]
    fn text_output_into_date_field() {
        let b = binding(
            vec![DataMapping::parse("field:name", "serviceInput:ticketId")],
            vec![DataMapping::parse("serviceOutput:status", "field:when")],
        );
        assert_eq!(error_codes(&check(&b)), vec![codes::TYPE_MISMATCH]);
    }

    #[test]
    fn unknown_parameter_and_wrong_scope() {
        let b = binding(
            vec![
                DataMapping::parse("field:name", "serviceInput:ticketId"),
                DataMapping::parse("field:name", "serviceInput:nope"),
            ],
            vec![DataMapping::parse("row:id", "field:name")],
        );
        assert_eq!(
            error_codes(&check(&b)),
            vec![codes::UNKNOWN_PARAMETER, codes::SCOPE_NOT_ALLOWED]
        );
    }

    #[test]
    fn table_needs_wildcard_column_address() {
        let b = binding(
            vec![DataMapping::parse("field:name", "serviceInput:ticketId")],
            vec![DataMapping::parse(
                "serviceOutput:contacts[*].contactId",
                "field:tickets.id",
            )],
        );
        assert_eq!(error_codes(&check(&b)), vec![codes::WILDCARD_MISUSE]);
    }
}
