//! Functional edits on the application model.
//!
//! [`apply_edit`] never mutates its input: it returns a new model with the
//! version bumped, or a diagnostic and nothing else. Every accepted command has
//! an [`EditCommand::inverse`], which is what the builder's undo uses.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::diag::{codes, Diagnostic};
use crate::kind::{Capability, FieldKind};
use crate::model::{
    loc, Application, BindingRole, DataMapping, FieldSpec, Form, GlobalVariable, NavSource, NavigationLink, Page,
    ServiceBinding,
};
use crate::path::{DataRef, RefPath, Scope, Segment};
use crate::structure::check_structure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum EditOp {
    CreateApp,
    AddForm,
    AddPage,
    AddField,
    SetProperty,
    HideField,
    AddNavigation,
    BindService,
    RemoveNode,
    RenameNode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EditCommand {
    pub op: EditOp,
    /// Model path such as `/forms/schedule/pages/page1`.
    #[serde(default)]
    pub target: String,
    #[serde(default)]
    pub payload: Value,
}

impl EditCommand {
    pub fn new(op: EditOp, target: impl Into<String>, payload: Value) -> Self {
        Self {
            op,
            target: target.into(),
            payload,
        }
    }
}

/// A resolved edit target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodePath {
    Root,
    Globals,
    Global(String),
    Form(String),
    Page(String, String),
    Field(String, String),
    Column(String, String, String),
}

impl NodePath {
    pub fn parse(path: &str) -> Option<Self> {
        let parts: Vec<&str> = path.split('/').filter(|s| !s.is_empty()).collect();
        let own = |s: &str| s.to_string();
        Some(match parts.as_slice() {
            [] => NodePath::Root,
            ["globals"] => NodePath::Globals,
            ["globals", g] => NodePath::Global(own(g)),
            ["forms", f] => NodePath::Form(own(f)),
            ["forms", f, "pages", p] => NodePath::Page(own(f), own(p)),
            ["forms", f, "fields", x] => NodePath::Field(own(f), own(x)),
            ["forms", f, "fields", t, "columns", c] => NodePath::Column(own(f), own(t), own(c)),
            _ => return None,
        })
    }

    pub fn render(&self) -> String {
        match self {
            NodePath::Root => loc::app(),
            NodePath::Globals => "/globals".to_string(),
            NodePath::Global(g) => loc::global(g),
            NodePath::Form(f) => loc::form(f),
            NodePath::Page(f, p) => loc::page(f, p),
            NodePath::Field(f, x) => loc::field(f, x),
            NodePath::Column(f, t, c) => loc::column(f, t, c),
        }
    }
}

type EditResult<T> = Result<T, Diagnostic>;

fn not_found(target: &str) -> Diagnostic {
    Diagnostic::error(codes::TARGET_NOT_FOUND, target, format!("no node at `{target}`"))
}

fn invalid(target: &str, message: impl Into<String>) -> Diagnostic {
    Diagnostic::error(codes::INVALID_PAYLOAD, target, message)
}

/// Applies `cmd` to a copy of `app`.
pub fn apply_edit(app: &Application, cmd: &EditCommand) -> EditResult<Application> {
    let target = cmd.target.as_str();
    if cmd.op == EditOp::CreateApp {
        let name = payload_str(&cmd.payload, "name", target)?;
        let created = Application::blank(name);
        return structurally_valid(created, target);
    }

    let path = NodePath::parse(target).ok_or_else(|| not_found(target))?;
    let mut next = app.clone();
    match cmd.op {
        EditOp::CreateApp => unreachable!(),
        EditOp::AddForm => add_form(&mut next, &path, &cmd.payload, target)?,
        EditOp::AddPage => add_page(&mut next, &path, &cmd.payload, target)?,
        EditOp::AddField => add_field(&mut next, &path, &cmd.payload, target)?,
        EditOp::SetProperty => {
            let property = payload_str(&cmd.payload, "property", target)?;
            let value = cmd.payload.get("value").cloned().unwrap_or(Value::Null);
            set_property(&mut next, &path, &property, value, target)?;
        }
        EditOp::HideField => {
            let hidden = match cmd.payload.get("hidden") {
                None => true,
                Some(v) => v
                    .as_bool()
                    .ok_or_else(|| invalid(target, "`hidden` must be a boolean"))?,
            };
            set_property(&mut next, &path, "hidden", Value::Bool(hidden), target)?;
        }
        EditOp::AddNavigation => add_navigation(&mut next, &path, &cmd.payload, target)?,
        EditOp::BindService => bind_service(&mut next, &path, &cmd.payload, target)?,
        EditOp::RemoveNode => {
            remove_node(&mut next, &path, target)?;
        }
        EditOp::RenameNode => {
            let id = payload_str(&cmd.payload, "id", target)?;
            rename_node(&mut next, &path, &id, target)?;
        }
    }
    next.version = app.version + 1;
    structurally_valid(next, target)
}

fn structurally_valid(app: Application, target: &str) -> EditResult<Application> {
    match check_structure(&app).into_iter().find(Diagnostic::is_error) {
        None => Ok(app),
        Some(d) => Err(invalid(target, format!("edit would break the model: {d}"))),
    }
}

fn payload_str(payload: &Value, key: &str, target: &str) -> EditResult<String> {
    payload
        .get(key)
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| invalid(target, format!("payload needs string `{key}`")))
}

/// Splits an optional `index` off an insertion payload.
fn split_index(payload: &Value, target: &str) -> EditResult<(Map<String, Value>, Option<usize>)> {
    let mut obj = payload
        .as_object()
        .cloned()
        .ok_or_else(|| invalid(target, "payload must be an object"))?;
    let index = match obj.remove("index") {
        None | Some(Value::Null) => None,
        Some(v) => Some(
            v.as_u64()
                .ok_or_else(|| invalid(target, "`index` must be a non-negative integer"))? as usize,
        ),
    };
    Ok((obj, index))
}

fn decode<T: serde::de::DeserializeOwned>(obj: Map<String, Value>, target: &str) -> EditResult<T> {
    serde_json::from_value(Value::Object(obj)).map_err(|e| invalid(target, e.to_string()))
}

fn insert_at<T>(list: &mut Vec<T>, item: T, index: Option<usize>, target: &str) -> EditResult<()> {
    let at = index.unwrap_or(list.len());
    if at > list.len() {
        return Err(invalid(
            target,
            format!("index {at} past end of list of {}", list.len()),
        ));
    }
    list.insert(at, item);
    Ok(())
}

fn form_mut<'a>(app: &'a mut Application, id: &str, target: &str) -> EditResult<&'a mut Form> {
    app.form_mut(id).ok_or_else(|| not_found(target))
}

fn field_mut<'a>(app: &'a mut Application, path: &NodePath, target: &str) -> EditResult<&'a mut FieldSpec> {
    match path {
        NodePath::Field(f, x) => form_mut(app, f, target)?.field_mut(x).ok_or_else(|| not_found(target)),
        NodePath::Column(f, t, c) => form_mut(app, f, target)?
            .field_mut(t)
            .and_then(|table| table.columns.iter_mut().find(|col| col.id == *c))
            .ok_or_else(|| not_found(target)),
        _ => Err(not_found(target)),
    }
}

fn add_form(app: &mut Application, path: &NodePath, payload: &Value, target: &str) -> EditResult<()> {
    if *path != NodePath::Root {
        return Err(not_found(target));
    }
    let (mut obj, index) = split_index(payload, target)?;
    obj.entry("pages")
        .or_insert_with(|| json!([{"id": "page1", "fields": []}]));
    let form: Form = decode(obj, target)?;
    insert_at(&mut app.forms, form, index, target)
}

fn add_page(app: &mut Application, path: &NodePath, payload: &Value, target: &str) -> EditResult<()> {
    let NodePath::Form(f) = path else {
        return Err(not_found(target));
    };
    let (mut obj, index) = split_index(payload, target)?;
    obj.entry("fields").or_insert_with(|| json!([]));
    let page: Page = decode(obj, target)?;
    insert_at(&mut form_mut(app, f, target)?.pages, page, index, target)
}

fn add_field(app: &mut Application, path: &NodePath, payload: &Value, target: &str) -> EditResult<()> {
    let (obj, index) = split_index(payload, target)?;
    match path {
        NodePath::Globals => {
            let global: GlobalVariable = decode(obj, target)?;
            insert_at(&mut app.globals, global, index, target)
        }
        NodePath::Page(f, p) => {
            let field: FieldSpec = decode(obj, target)?;
            let page = form_mut(app, f, target)?
                .pages
                .iter_mut()
                .find(|page| page.id == *p)
                .ok_or_else(|| not_found(target))?;
            insert_at(&mut page.fields, field, index, target)
        }
        NodePath::Field(..) => {
            let column: FieldSpec = decode(obj, target)?;
            let table = field_mut(app, path, target)?;
            if table.kind != FieldKind::Table {
                return Err(invalid(
                    target,
                    format!("cannot add a column to a {} field", table.kind),
                ));
            }
            insert_at(&mut table.columns, column, index, target)
        }
        _ => Err(not_found(target)),
    }
}

/// Current value of a property, in the JSON shape `setProperty` accepts.
fn get_property(app: &Application, path: &NodePath, property: &str) -> Option<Value> {
    Some(match (path, property) {
        (NodePath::Root, "name") => json!(app.name),
        (NodePath::Form(f), "title") => json!(app.form(f)?.title),
        (NodePath::Global(g), "kind") => json!(app.global(g)?.kind),
        (NodePath::Field(..) | NodePath::Column(..), prop) => {
            let field = match path {
                NodePath::Field(f, x) => app.form(f)?.field(x)?,
                NodePath::Column(f, t, c) => app.form(f)?.field(t)?.column(c)?,
                _ => unreachable!(),
            };
            match prop {
                "label" => json!(field.label),
                "kind" => json!(field.kind),
                "editable" => json!(field.editable),
                "hidden" => json!(field.hidden),
                "capability" => json!(field.capability),
                _ => return None,
            }
        }
        _ => return None,
    })
}

fn set_property(app: &mut Application, path: &NodePath, property: &str, value: Value, target: &str) -> EditResult<()> {
    fn typed<T: serde::de::DeserializeOwned>(value: Value, property: &str, target: &str) -> EditResult<T> {
        serde_json::from_value(value).map_err(|e| invalid(target, format!("bad value for `{property}`: {e}")))
    }
    let unknown = || invalid(target, format!("no property `{property}` on this node"));
    match (path, property) {
        (NodePath::Root, "name") => app.name = typed(value, property, target)?,
        (NodePath::Form(f), "title") => form_mut(app, f, target)?.title = typed(value, property, target)?,
        (NodePath::Global(g), "kind") => {
            let kind = typed(value, property, target)?;
            app.globals
                .iter_mut()
                .find(|x| x.name == *g)
                .ok_or_else(|| not_found(target))?
                .kind = kind;
        }
        (NodePath::Field(..) | NodePath::Column(..), _) => {
            let field = field_mut(app, path, target)?;
            match property {
                "label" => field.label = typed(value, property, target)?,
                "kind" => field.kind = typed::<FieldKind>(value, property, target)?,
                "editable" => field.editable = typed(value, property, target)?,
                "hidden" => field.hidden = typed(value, property, target)?,
                "capability" => field.capability = typed::<Option<Capability>>(value, property, target)?,
                _ => return Err(unknown()),
            }
        }
        _ => return Err(unknown()),
    }
    Ok(())
}

fn add_navigation(app: &mut Application, path: &NodePath, payload: &Value, target: &str) -> EditResult<()> {
    let NodePath::Field(..) = path else {
        return Err(not_found(target));
    };
    let field = field_mut(app, path, target)?;
    let source_kind = match field.kind {
        FieldKind::Table => NavSource::TableRow,
        FieldKind::Button => NavSource::Button,
        other => return Err(invalid(target, format!("a {other} field cannot navigate"))),
    };
    let link = if payload.is_null() {
        None
    } else {
        let mut obj = payload
            .as_object()
            .cloned()
            .ok_or_else(|| invalid(target, "payload must be a navigation link or null"))?;
        obj.entry("sourceKind").or_insert_with(|| json!(source_kind));
        Some(decode::<NavigationLink>(obj, target)?)
    };
    match source_kind {
        NavSource::TableRow => field.row_navigation = link,
        NavSource::Button => field.navigation = link,
    }
    Ok(())
}

fn bind_service(app: &mut Application, path: &NodePath, payload: &Value, target: &str) -> EditResult<()> {
    let NodePath::Form(f) = path else {
        return Err(not_found(target));
    };
    let role: BindingRole = payload
        .get("role")
        .cloned()
        .ok_or_else(|| invalid(target, "payload needs `role`"))
        .and_then(|v| serde_json::from_value(v).map_err(|e| invalid(target, e.to_string())))?;
    let binding: Option<ServiceBinding> = match payload.get("binding") {
        None | Some(Value::Null) => None,
        Some(v) => Some(serde_json::from_value(v.clone()).map_err(|e| invalid(target, e.to_string()))?),
    };
    let form = form_mut(app, f, target)?;
    match role {
        BindingRole::Prepopulate => form.prepopulate = binding,
        BindingRole::Save => form.save = binding,
    }
    Ok(())
}

/// Removes a node and returns its JSON plus the index it occupied.
fn remove_node(app: &mut Application, path: &NodePath, target: &str) -> EditResult<(Value, usize)> {
    fn take<T: Serialize>(list: &mut Vec<T>, pos: Option<usize>, target: &str) -> EditResult<(Value, usize)> {
        let pos = pos.ok_or_else(|| not_found(target))?;
        let node = list.remove(pos);
        Ok((serde_json::to_value(node).expect("model nodes serialize"), pos))
    }
    match path {
        NodePath::Global(g) => {
            let pos = app.globals.iter().position(|x| x.name == *g);
            take(&mut app.globals, pos, target)
        }
        NodePath::Form(f) => {
            let pos = app.forms.iter().position(|x| x.id == *f);
            take(&mut app.forms, pos, target)
        }
        NodePath::Page(f, p) => {
            let form = form_mut(app, f, target)?;
            let pos = form.pages.iter().position(|x| x.id == *p);
            take(&mut form.pages, pos, target)
        }
        NodePath::Field(f, x) => {
            let form = form_mut(app, f, target)?;
            let page = form
                .pages
                .iter_mut()
                .find(|p| p.fields.iter().any(|fl| fl.id == *x))
                .ok_or_else(|| not_found(target))?;
            let pos = page.fields.iter().position(|fl| fl.id == *x);
            take(&mut page.fields, pos, target)
        }
        NodePath::Column(..) => {
            let NodePath::Column(f, t, c) = path else {
                unreachable!()
            };
            let table = field_mut(app, &NodePath::Field(f.clone(), t.clone()), target)?;
            let pos = table.columns.iter().position(|col| col.id == *c);
            take(&mut table.columns, pos, target)
        }
        NodePath::Root | NodePath::Globals => Err(invalid(target, "this node cannot be removed")),
    }
}

/// Where a mapping lives, for reference rewriting.
struct Site<'a> {
    owner: &'a str,
    nav: Option<(&'a str, &'a FieldSpec)>,
}

fn for_each_mapping_mut(app: &mut Application, mut f: impl FnMut(&Site<'_>, &mut DataMapping)) {
    for form in &mut app.forms {
        let owner = form.id.clone();
        for binding in [form.prepopulate.as_mut(), form.save.as_mut()].into_iter().flatten() {
            let site = Site {
                owner: &owner,
                nav: None,
            };
            for m in binding.inputs.iter_mut().chain(binding.outputs.iter_mut()) {
                f(&site, m);
            }
        }
        for field in form.pages.iter_mut().flat_map(|p| p.fields.iter_mut()) {
            let snapshot = FieldSpec {
                row_navigation: None,
                navigation: None,
                ..field.clone()
            };
            for link in [field.row_navigation.as_mut(), field.navigation.as_mut()]
                .into_iter()
                .flatten()
            {
                let target = link.target.clone();
                let site = Site {
                    owner: &owner,
                    nav: Some((&target, &snapshot)),
                };
                for m in &mut link.mappings {
                    f(&site, m);
                }
            }
        }
    }
}

fn rename_head(r: &mut DataRef, scope: Scope, old: &str, new: &str) {
    if r.scope == scope && r.path.head().name == old {
        let mut segs = r.path.segments().to_vec();
        segs[0].name = new.to_string();
        r.path = RefPath::new(segs).expect("renamed path stays well-formed");
    }
}

fn rename_column_ref(r: &mut DataRef, table: &str, old: &str, new: &str) {
    let segs = r.path.segments();
    if r.scope == Scope::Field && segs.len() == 2 && segs[0].name == table && segs[1].name == old {
        r.path = RefPath::new(vec![segs[0].clone(), Segment::plain(new)]).expect("well-formed");
    }
}

fn rename_node(app: &mut Application, path: &NodePath, new: &str, target: &str) -> EditResult<()> {
    match path {
        NodePath::Global(g) => {
            let global = app
                .globals
                .iter_mut()
                .find(|x| x.name == *g)
                .ok_or_else(|| not_found(target))?;
            global.name = new.to_string();
            for_each_mapping_mut(app, |_, m| {
                rename_head(&mut m.from, Scope::Global, g, new);
                rename_head(&mut m.to, Scope::Global, g, new);
            });
        }
        NodePath::Form(f) => {
            form_mut(app, f, target)?.id = new.to_string();
            for form in &mut app.forms {
                for field in form.pages.iter_mut().flat_map(|p| p.fields.iter_mut()) {
                    for link in [field.row_navigation.as_mut(), field.navigation.as_mut()]
                        .into_iter()
                        .flatten()
                    {
                        if link.target == *f {
                            link.target = new.to_string();
                        }
                    }
                }
            }
        }
        NodePath::Page(f, p) => {
            form_mut(app, f, target)?
                .pages
                .iter_mut()
                .find(|x| x.id == *p)
                .ok_or_else(|| not_found(target))?
                .id = new.to_string();
        }
        NodePath::Field(f, x) => {
            field_mut(app, path, target)?.id = new.to_string();
            for_each_mapping_mut(app, |site, m| match site.nav {
                None if site.owner == f => {
                    rename_head(&mut m.from, Scope::Field, x, new);
                    rename_head(&mut m.to, Scope::Field, x, new);
                }
                None => {}
                Some((nav_target, _)) => {
                    if site.owner == f {
                        rename_head(&mut m.from, Scope::Field, x, new);
                    }
                    if nav_target == f {
                        rename_head(&mut m.to, Scope::Field, x, new);
                    }
                }
            });
        }
        NodePath::Column(f, t, c) => {
            field_mut(app, path, target)?.id = new.to_string();
            for_each_mapping_mut(app, |site, m| {
                if site.owner != f {
                    return;
                }
                match site.nav {
                    None => {
                        rename_column_ref(&mut m.from, t, c, new);
                        rename_column_ref(&mut m.to, t, c, new);
                    }
                    Some((_, source)) if source.id == *t => {
                        rename_head(&mut m.from, Scope::Row, c, new);
                    }
                    Some(_) => {}
                }
            });
        }
        NodePath::Root | NodePath::Globals => return Err(invalid(target, "this node cannot be renamed")),
    }
    Ok(())
}

fn renamed(path: &NodePath, new: &str) -> NodePath {
    let n = new.to_string();
    match path.clone() {
        NodePath::Global(_) => NodePath::Global(n),
        NodePath::Form(_) => NodePath::Form(n),
        NodePath::Page(f, _) => NodePath::Page(f, n),
        NodePath::Field(f, _) => NodePath::Field(f, n),
        NodePath::Column(f, t, _) => NodePath::Column(f, t, n),
        other => other,
    }
}

impl EditCommand {
    /// The command that undoes `self` when applied to the model `self`
    /// produced from `before`. `None` for `createApp`, which has no
    /// predecessor, and for commands that do not apply to `before`.
    pub fn inverse(&self, before: &Application) -> Option<EditCommand> {
        let path = NodePath::parse(&self.target)?;
        let inv = |op, target: String, payload| Some(EditCommand::new(op, target, payload));
        match self.op {
            EditOp::CreateApp => None,
            EditOp::AddForm | EditOp::AddPage | EditOp::AddField => {
                let id = self
                    .payload
                    .get("id")
                    .or_else(|| self.payload.get("name"))?
                    .as_str()?
                    .to_string();
                let removed = match path {
                    NodePath::Root => NodePath::Form(id),
                    NodePath::Form(f) => NodePath::Page(f, id),
                    NodePath::Globals => NodePath::Global(id),
                    NodePath::Page(f, _) => NodePath::Field(f, id),
                    NodePath::Field(f, t) => NodePath::Column(f, t, id),
                    _ => return None,
                };
                inv(EditOp::RemoveNode, removed.render(), Value::Null)
            }
            EditOp::SetProperty => {
                let property = self.payload.get("property")?.as_str()?;
                let old = get_property(before, &path, property)?;
                inv(
                    EditOp::SetProperty,
                    self.target.clone(),
                    json!({"property": property, "value": old}),
                )
            }
            EditOp::HideField => {
                let old = get_property(before, &path, "hidden")?;
                inv(EditOp::HideField, self.target.clone(), json!({"hidden": old}))
            }
            EditOp::AddNavigation => {
                let NodePath::Field(f, x) = &path else { return None };
                let old = before.form(f)?.field(x)?.link().cloned();
                inv(
                    EditOp::AddNavigation,
                    self.target.clone(),
                    serde_json::to_value(old).ok()?,
                )
            }
            EditOp::BindService => {
                let NodePath::Form(f) = &path else { return None };
                let role: BindingRole = serde_json::from_value(self.payload.get("role")?.clone()).ok()?;
                let old = before.form(f)?.binding(role).cloned();
                inv(
                    EditOp::BindService,
                    self.target.clone(),
                    json!({"role": role, "binding": old}),
                )
            }
            EditOp::RemoveNode => {
                let mut scratch = before.clone();
                let (node, index) = remove_node(&mut scratch, &path, &self.target).ok()?;
                let mut payload = node;
                payload.as_object_mut()?.insert("index".into(), json!(index));
                let (op, parent) = match &path {
                    NodePath::Global(_) => (EditOp::AddField, NodePath::Globals),
                    NodePath::Form(_) => (EditOp::AddForm, NodePath::Root),
                    NodePath::Page(f, _) => (EditOp::AddPage, NodePath::Form(f.clone())),
                    NodePath::Field(f, x) => {
                        let page = before
                            .form(f)?
                            .pages
                            .iter()
                            .find(|p| p.fields.iter().any(|fl| fl.id == *x))?;
                        (EditOp::AddField, NodePath::Page(f.clone(), page.id.clone()))
                    }
                    NodePath::Column(f, t, _) => (EditOp::AddField, NodePath::Field(f.clone(), t.clone())),
                    _ => return None,
                };
                inv(op, parent.render(), payload)
            }
            EditOp::RenameNode => {
                let new = self.payload.get("id")?.as_str()?;
                let old = match &path {
                    NodePath::Global(x)
                    | NodePath::Form(x)
                    | NodePath::Page(_, x)
                    | NodePath::Field(_, x)
                    | NodePath::Column(_, _, x) => x.clone(),
                    _ => return None,
                };
                inv(EditOp::RenameNode, renamed(&path, new).render(), json!({"id": old}))
            }
        }
    }
}
