//! The declarative application model.

use serde::{Deserialize, Serialize};

use crate::kind::{Capability, FieldKind};
use crate::path::DataRef;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Application {
    pub name: String,
    /// Bumped by every accepted edit.
    #[serde(default = "first_version")]
    pub version: u64,
    pub globals: Vec<GlobalVariable>,
    pub forms: Vec<Form>,
}

fn first_version() -> u64 {
    1
}

impl Application {
    /// A one-form, one-page application with nothing on it.
    pub fn blank(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            version: 1,
            globals: Vec::new(),
            forms: vec![Form::new("main", "Main")],
        }
    }

    /// The form shown when a session starts: the first one in document order.
    pub fn entry_form(&self) -> Option<&Form> {
        self.forms.first()
    }

    pub fn form(&self, id: &str) -> Option<&Form> {
        self.forms.iter().find(|f| f.id == id)
    }

    pub fn form_mut(&mut self, id: &str) -> Option<&mut Form> {
        self.forms.iter_mut().find(|f| f.id == id)
    }

    pub fn global(&self, name: &str) -> Option<&GlobalVariable> {
        self.globals.iter().find(|g| g.name == name)
    }

    /// Every binding in the app, tagged with its owning form and role.
    pub fn bindings(&self) -> impl Iterator<Item = (&Form, BindingRole, &ServiceBinding)> {
        self.forms.iter().flat_map(|f| {
            let pre = f.prepopulate.as_ref().map(|b| (f, BindingRole::Prepopulate, b));
            let save = f.save.as_ref().map(|b| (f, BindingRole::Save, b));
            pre.into_iter().chain(save)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Form {
    pub id: String,
    pub title: String,
    pub pages: Vec<Page>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prepopulate: Option<ServiceBinding>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub save: Option<ServiceBinding>,
}

impl Form {
    pub fn new(id: impl Into<String>, title: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            title: title.into(),
            pages: vec![Page::new("page1")],
            prepopulate: None,
            save: None,
        }
    }

    /// Top-level fields of every page, in page order.
    pub fn fields(&self) -> impl Iterator<Item = &FieldSpec> {
        self.pages.iter().flat_map(|p| p.fields.iter())
    }

    pub fn field(&self, id: &str) -> Option<&FieldSpec> {
        self.fields().find(|f| f.id == id)
    }

    pub fn field_mut(&mut self, id: &str) -> Option<&mut FieldSpec> {
        self.pages
            .iter_mut()
            .flat_map(|p| p.fields.iter_mut())
            .find(|f| f.id == id)
    }

    pub fn page(&self, id: &str) -> Option<&Page> {
        self.pages.iter().find(|p| p.id == id)
    }

    pub fn binding(&self, role: BindingRole) -> Option<&ServiceBinding> {
        match role {
            BindingRole::Prepopulate => self.prepopulate.as_ref(),
            BindingRole::Save => self.save.as_ref(),
        }
    }

    /// Navigation links declared on this form's buttons and tables.
    pub fn navigations(&self) -> impl Iterator<Item = (&FieldSpec, &NavigationLink)> {
        self.fields().filter_map(|f| f.link().map(|l| (f, l)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Page {
    pub id: String,
    pub fields: Vec<FieldSpec>,
}

impl Page {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            fields: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct FieldSpec {
    pub id: String,
    pub label: String,
    pub kind: FieldKind,
    #[serde(default)]
    pub editable: bool,
    /// Hidden fields are left out of the rendered screen but keep their data.
    #[serde(default)]
    pub hidden: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capability: Option<Capability>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub columns: Vec<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row_navigation: Option<NavigationLink>,
    /// Link followed when a button is pressed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub navigation: Option<NavigationLink>,
}

impl FieldSpec {
    pub fn new(id: impl Into<String>, label: impl Into<String>, kind: FieldKind) -> Self {
        Self {
            id: id.into(),
            label: label.into(),
            kind,
            editable: false,
            hidden: false,
            capability: None,
            columns: Vec::new(),
            row_navigation: None,
            navigation: None,
        }
    }

    pub fn editable(mut self) -> Self {
        self.editable = true;
        self
    }

    pub fn hidden(mut self) -> Self {
        self.hidden = true;
        self
    }

    pub fn with_capability(mut self, capability: Capability) -> Self {
        self.capability = Some(capability);
        self
    }

    pub fn with_columns(mut self, columns: Vec<FieldSpec>) -> Self {
        self.columns = columns;
        self
    }

    pub fn column(&self, id: &str) -> Option<&FieldSpec> {
        self.columns.iter().find(|c| c.id == id)
    }

    /// The navigation link this field triggers, whichever slot holds it.
    pub fn link(&self) -> Option<&NavigationLink> {
        self.row_navigation.as_ref().or(self.navigation.as_ref())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct GlobalVariable {
    pub name: String,
    pub kind: FieldKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum NavSource {
    Button,
    TableRow,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct NavigationLink {
    pub source_kind: NavSource,
    pub target: String,
    #[serde(default)]
    pub mappings: Vec<DataMapping>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataMapping {
    pub from: DataRef,
    pub to: DataRef,
}

impl DataMapping {
    /// Builds a mapping from two `scope:path` strings.
    ///
    /// Panics on malformed references; meant for fixtures and tests.
    pub fn parse(from: &str, to: &str) -> Self {
        Self {
            from: from.parse().expect("valid `from` reference"),
            to: to.parse().expect("valid `to` reference"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ServiceRef {
    pub system_id: String,
    pub service_id: String,
}

impl std::fmt::Display for ServiceRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.system_id, self.service_id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ServiceBinding {
    pub service_ref: ServiceRef,
    /// App data into service inputs.
    #[serde(default)]
    pub inputs: Vec<DataMapping>,
    /// Service outputs into app data.
    #[serde(default)]
    pub outputs: Vec<DataMapping>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum BindingRole {
    Prepopulate,
    Save,
}

impl BindingRole {
    pub fn as_str(self) -> &'static str {
        match self {
            BindingRole::Prepopulate => "prepopulate",
            BindingRole::Save => "save",
        }
    }
}

impl std::fmt::Display for BindingRole {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Model paths used by diagnostics and edit targets.
pub mod loc {
    pub fn app() -> String {
        "/".to_string()
    }

    pub fn form(form: &str) -> String {
        format!("/forms/{form}")
    }

    pub fn page(form: &str, page: &str) -> String {
        format!("/forms/{form}/pages/{page}")
    }

    pub fn field(form: &str, field: &str) -> String {
        format!("/forms/{form}/fields/{field}")
    }

    pub fn column(form: &str, table: &str, column: &str) -> String {
        format!("/forms/{form}/fields/{table}/columns/{column}")
    }

    pub fn global(name: &str) -> String {
        format!("/globals/{name}")
    }

    pub fn binding(form: &str, role: super::BindingRole) -> String {
        format!("/forms/{form}/{role}")
    }
}
