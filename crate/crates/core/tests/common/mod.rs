//! Random valid application models for property tests.

#![allow(dead_code)]

pub mod laws;
pub mod oracle;

use proptest::prelude::*;
use screenforge_core::kind::{Capability, FieldKind};
use screenforge_core::model::{
    Application, DataMapping, FieldSpec, Form, GlobalVariable, NavSource, NavigationLink, Page, ServiceBinding,
    ServiceRef,
};

const SCALARS: [FieldKind; 7] = [
    FieldKind::Text,
    FieldKind::Multiline,
    FieldKind::Date,
    FieldKind::Phone,
    FieldKind::Photo,
    FieldKind::Address,
    FieldKind::Number,
];

#[derive(Debug, Clone)]
struct ColumnDraft {
    kind: FieldKind,
    label: String,
    hidden: bool,
}

#[derive(Debug, Clone)]
struct FieldDraft {
    kind: FieldKind,
    label: String,
    hidden: bool,
    editable: bool,
    capability: bool,
    columns: Vec<ColumnDraft>,
    nav_target: Option<usize>,
}

#[derive(Debug, Clone)]
struct FormDraft {
    title: String,
    pages: Vec<Vec<FieldDraft>>,
    prepopulate: bool,
    save: bool,
}

fn label() -> impl Strategy<Value = String> {
    prop_oneof![
        "[A-Za-z ]{0,12}",
        "\\PC{0,8}",
        Just("Quote \" back\\slash \t tab".to_string()),
    ]
}

fn any_kind() -> impl Strategy<Value = FieldKind> {
    prop::sample::select(FieldKind::ALL.to_vec())
}

fn scalar_kind() -> impl Strategy<Value = FieldKind> {
    prop::sample::select(SCALARS.to_vec())
}

fn column() -> impl Strategy<Value = ColumnDraft> {
    (scalar_kind(), label(), any::<bool>()).prop_map(|(kind, label, hidden)| ColumnDraft { kind, label, hidden })
}

fn field() -> impl Strategy<Value = FieldDraft> {
    (
        any_kind(),
        label(),
        any::<bool>(),
        any::<bool>(),
        any::<bool>(),
        prop::collection::vec(column(), 1..4),
        prop::option::of(0usize..8),
    )
        .prop_map(
            |(kind, label, hidden, editable, capability, columns, nav_target)| FieldDraft {
                kind,
                label,
                hidden,
                editable,
                capability,
                columns,
                nav_target,
            },
        )
}

fn form() -> impl Strategy<Value = FormDraft> {
    (
        label(),
        prop::collection::vec(prop::collection::vec(field(), 0..4), 1..3),
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(|(title, pages, prepopulate, save)| FormDraft {
            title,
            pages,
            prepopulate,
            save,
        })
}

fn build(name: String, version: u64, globals: Vec<FieldKind>, forms: Vec<FormDraft>) -> Application {
    let form_count = forms.len();
    let globals: Vec<GlobalVariable> = globals
        .into_iter()
        .enumerate()
        .map(|(i, kind)| GlobalVariable {
            name: format!("g{i}"),
            kind,
        })
        .collect();
    let mut built = Vec::new();
    for (fi, draft) in forms.into_iter().enumerate() {
        let mut counter = 0;
        let mut pages = Vec::new();
        let mut first_scalar: Option<String> = None;
        for (pi, fields) in draft.pages.into_iter().enumerate() {
            let mut page = Page::new(format!("p{pi}"));
            for fd in fields {
                let id = format!("x{counter}");
                counter += 1;
                let mut spec = FieldSpec::new(id.clone(), fd.label, fd.kind);
                spec.hidden = fd.hidden;
                spec.editable = fd.editable;
                if fd.capability {
                    spec.capability = fd.kind.permitted_capability();
                }
                match fd.kind {
                    FieldKind::Table => {
                        spec.columns = fd
                            .columns
                            .into_iter()
                            .enumerate()
                            .map(|(ci, c)| {
                                let mut col = FieldSpec::new(format!("c{ci}"), c.label, c.kind);
                                col.hidden = c.hidden;
                                col
                            })
                            .collect();
                        spec.row_navigation = fd.nav_target.map(|t| NavigationLink {
                            source_kind: NavSource::TableRow,
                            target: format!("f{}", t % form_count),
                            mappings: vec![],
                        });
                    }
                    FieldKind::Button => {
                        spec.navigation = fd.nav_target.map(|t| NavigationLink {
                            source_kind: NavSource::Button,
                            target: format!("f{}", t % form_count),
                            mappings: vec![],
                        });
                    }
                    _ => {
                        first_scalar.get_or_insert(id);
                    }
                }
                page.fields.push(spec);
            }
            pages.push(page);
        }
        let binding = |svc: &str, input: Option<&String>| ServiceBinding {
            service_ref: ServiceRef {
                system_id: "sys-test".into(),
                service_id: svc.into(),
            },
            inputs: input
                .map(|f| vec![DataMapping::parse(&format!("field:{f}"), "serviceInput:value")])
                .unwrap_or_default(),
            outputs: vec![],
        };
        built.push(Form {
            id: format!("f{fi}"),
            title: draft.title,
            pages,
            prepopulate: draft.prepopulate.then(|| binding("load", None)),
            save: draft.save.then(|| binding("store", first_scalar.as_ref())),
        });
    }
    Application {
        name,
        version,
        globals,
        forms: built,
    }
}

/// Structurally valid applications: unique ids, tables with scalar columns,
/// capabilities only where permitted, navigation only on tables and buttons.
pub fn app() -> impl Strategy<Value = Application> {
    (
        "[A-Z][A-Za-z0-9]{0,8}",
        1u64..1000,
        prop::collection::vec(scalar_kind(), 0..3),
        prop::collection::vec(form(), 1..4),
    )
        .prop_map(|(name, version, globals, forms)| build(name, version, globals, forms))
}

pub fn capability_for(kind: FieldKind) -> Option<Capability> {
    kind.permitted_capability()
}
