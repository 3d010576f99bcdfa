//! The interpreter: hosted bundles, sessions and their operations.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex as StdMutex};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use dashmap::DashMap;
use serde_json::{json, Map, Value as Json};
use tokio::sync::Mutex;

use screenforge_core::catalogue::{Catalogue, Status};
use screenforge_core::kind::{Capability, FieldKind};
use screenforge_core::model::{Application, BindingRole, Form, NavSource};
use screenforge_core::transform::{transform, Record};
use screenforge_core::workspace::Workspace;
use screenforge_core::{parse_app, AdapterSpec, Bundle, Diagnostic, Value};

use crate::invoke::{client, invoke_adapter, InvokeError, ADAPTER_TIMEOUT};
use crate::session::{FormState, Row, SaveResult, Session};

pub const ADAPTER_FAILURE: &str = "ADAPTER_FAILURE";
pub const CAPABILITY_UNAVAILABLE: &str = "CAPABILITY_UNAVAILABLE";
pub const VALUE_DROPPED: &str = "VALUE_DROPPED";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GatewayError {
    #[error("UNKNOWN_BUNDLE: `{0}` is not published")]
    UnknownBundle(String),
    #[error("UNKNOWN_SESSION: `{0}`")]
    UnknownSession(String),
    #[error("UNKNOWN_FORM: `{0}`")]
    UnknownForm(String),
    #[error("UNKNOWN_FIELD: `{0}` is not a field of the current form")]
    UnknownField(String),
    #[error("UNKNOWN_NAV_REF: `{0}` is not a navigation source of the current form")]
    UnknownNavRef(String),
    #[error("READ_ONLY_FIELD: `{0}` is not editable")]
    ReadOnlyField(String),
    #[error("KIND_MISMATCH: {0}")]
    KindMismatch(String),
    #[error("ROW_INDEX_REQUIRED: `{0}` navigates per row")]
    RowIndexRequired(String),
    #[error("ROW_OUT_OF_RANGE: row {index} of `{nav_ref}`, which has {rows} row(s)")]
    RowOutOfRange { nav_ref: String, index: usize, rows: usize },
    #[error("NO_SAVE_SERVICE: form `{0}` has no save binding")]
    NoSaveService(String),
    #[error("ADAPTER_FAILURE: {0}")]
    AdapterFailure(InvokeError),
    #[error("NO_CAPABILITY: `{0}` has no device capability")]
    NoCapability(String),
    #[error("MISSING_ADAPTER: bundle needs adapter `{0}`")]
    MissingAdapter(String),
    #[error("CHECKSUM_MISMATCH: bundle `{0}` does not verify")]
    ChecksumMismatch(String),
    #[error("INVALID_BUNDLE: {0}")]
    InvalidBundle(String),
    #[error("WORKSPACE_IO: {0}")]
    Workspace(String),
}

impl GatewayError {
    pub fn code(&self) -> &'static str {
        match self {
            GatewayError::UnknownBundle(_) => "UNKNOWN_BUNDLE",
            GatewayError::UnknownSession(_) => "UNKNOWN_SESSION",
            GatewayError::UnknownForm(_) => "UNKNOWN_FORM",
            GatewayError::UnknownField(_) => "UNKNOWN_FIELD",
            GatewayError::UnknownNavRef(_) => "UNKNOWN_NAV_REF",
            GatewayError::ReadOnlyField(_) => "READ_ONLY_FIELD",
            GatewayError::KindMismatch(_) => "KIND_MISMATCH",
            GatewayError::RowIndexRequired(_) => "ROW_INDEX_REQUIRED",
            GatewayError::RowOutOfRange { .. } => "ROW_OUT_OF_RANGE",
            GatewayError::NoSaveService(_) => "NO_SAVE_SERVICE",
            GatewayError::AdapterFailure(_) => ADAPTER_FAILURE,
            GatewayError::NoCapability(_) => "NO_CAPABILITY",
            GatewayError::MissingAdapter(_) => "MISSING_ADAPTER",
            GatewayError::ChecksumMismatch(_) => "CHECKSUM_MISMATCH",
            GatewayError::InvalidBundle(_) => "INVALID_BUNDLE",
            GatewayError::Workspace(_) => "WORKSPACE_IO",
        }
    }
}

pub type GatewayResult<T> = Result<T, GatewayError>;

/// Canned device features. `None` means the device lacks the feature; the
/// field then behaves as a plain field.
#[derive(Debug)]
pub struct CapabilityStubs {
    pub location: Option<String>,
    pub photo: Option<String>,
    pub dialer: bool,
    dialed: StdMutex<Vec<String>>,
}

impl Default for CapabilityStubs {
    fn default() -> Self {
        Self {
            location: Some("1 Airport Way".to_string()),
            photo: Some("photo://stub/0001".to_string()),
            dialer: true,
            dialed: StdMutex::new(Vec::new()),
        }
    }
}

impl CapabilityStubs {
    pub fn none() -> Self {
        Self {
            location: None,
            photo: None,
            dialer: false,
            dialed: StdMutex::new(Vec::new()),
        }
    }

    /// Numbers passed to the dialer so far.
    pub fn dialed(&self) -> Vec<String> {
        self.dialed.lock().unwrap().clone()
    }
}

/// A bundle plus the adapters it references, ready to run.
#[derive(Debug)]
pub struct Hosted {
    pub bundle: Bundle,
    pub app: Application,
    adapters: HashMap<(String, BindingRole), AdapterSpec>,
}

impl Hosted {
    pub fn adapter(&self, form: &str, role: BindingRole) -> Option<&AdapterSpec> {
        self.adapters.get(&(form.to_string(), role))
    }
}

/// Runs sessions over hosted bundles. Every backend call goes through
/// [`invoke_adapter`].
#[derive(Debug)]
pub struct Gateway {
    bundles: DashMap<String, Arc<Hosted>>,
    sessions: DashMap<String, Arc<Mutex<Session>>>,
    client: reqwest::Client,
    capabilities: CapabilityStubs,
    next: AtomicU64,
    salt: u64,
}

impl Default for Gateway {
    fn default() -> Self {
        Self::new()
    }
}

impl Gateway {
    pub fn new() -> Self {
        Self::with_options(ADAPTER_TIMEOUT, CapabilityStubs::default())
    }

    pub fn with_options(timeout: Duration, capabilities: CapabilityStubs) -> Self {
        let salt = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or_default();
        Self {
            bundles: DashMap::new(),
            sessions: DashMap::new(),
            client: client(timeout),
            capabilities,
            next: AtomicU64::new(1),
            salt,
        }
    }

    pub fn capabilities(&self) -> &CapabilityStubs {
        &self.capabilities
    }

    /// Makes `bundle` startable. `adapters` must cover every adapter id the
    /// bundle references.
    pub fn host(&self, bundle: Bundle, adapters: &[AdapterSpec]) -> GatewayResult<()> {
        if !bundle.verify() {
            return Err(GatewayError::ChecksumMismatch(bundle.bundle_id.clone()));
        }
        let app = parse_app(&bundle.model).map_err(|d| {
            GatewayError::InvalidBundle(format!("{}: {} model diagnostic(s)", bundle.bundle_id, d.len()))
        })?;
        let mut by_binding = HashMap::new();
        for r in &bundle.adapter_refs {
            let spec = adapters
                .iter()
                .find(|a| a.adapter_id == r.adapter_id)
                .ok_or_else(|| GatewayError::MissingAdapter(r.adapter_id.clone()))?;
            by_binding.insert((r.form_id.clone(), r.role), spec.clone());
        }
        self.bundles.insert(
            bundle.bundle_id.clone(),
            Arc::new(Hosted {
                bundle,
                app,
                adapters: by_binding,
            }),
        );
        Ok(())
    }

    /// Hosts every published bundle of `workspace`; returns their ids.
    pub fn load_workspace(&self, workspace: &Workspace) -> GatewayResult<Vec<String>> {
        let io = |e: &dyn std::fmt::Display| GatewayError::Workspace(e.to_string());
        let catalogue = Catalogue::open(workspace.catalogue_file()).map_err(|e| io(&e))?;
        let mut ids = Vec::new();
        for entry in catalogue.list().into_iter().filter(|e| e.status == Status::Published) {
            let bundle = Bundle::read_from(&workspace.bundle_dir(&entry.bundle_id)).map_err(|e| io(&e))?;
            let adapters = bundle
                .adapter_refs
                .iter()
                .map(|r| workspace.load_adapter(&r.adapter_id).map_err(|e| io(&e)))
                .collect::<GatewayResult<Vec<_>>>()?;
            self.host(bundle, &adapters)?;
            ids.push(entry.bundle_id);
        }
        Ok(ids)
    }

    pub fn bundle_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.bundles.iter().map(|e| e.key().clone()).collect();
        ids.sort();
        ids
    }

    pub fn hosted(&self, bundle_id: &str) -> Option<Arc<Hosted>> {
        self.bundles.get(bundle_id).map(|e| e.value().clone())
    }

    fn session(&self, session_id: &str) -> GatewayResult<Arc<Mutex<Session>>> {
        self.sessions
            .get(session_id)
            .map(|e| e.value().clone())
            .ok_or_else(|| GatewayError::UnknownSession(session_id.to_string()))
    }

    fn hosted_for(&self, session: &Session) -> GatewayResult<Arc<Hosted>> {
        self.hosted(&session.bundle_id)
            .ok_or_else(|| GatewayError::UnknownBundle(session.bundle_id.clone()))
    }

    /// Creates a session and opens the entry form.
    pub async fn start_session(&self, bundle_id: &str) -> GatewayResult<(String, FormState)> {
        let hosted = self
            .hosted(bundle_id)
            .ok_or_else(|| GatewayError::UnknownBundle(bundle_id.to_string()))?;
        let n = self.next.fetch_add(1, Ordering::Relaxed);
        let id = format!("s-{:08x}{:04x}", (self.salt ^ n.rotate_left(32)) as u32, n as u16);
        let session = Arc::new(Mutex::new(Session::new(id.clone(), bundle_id.to_string())));
        let mut guard = session.lock().await;
        self.sessions.insert(id.clone(), session.clone());
        let entry = hosted.app.entry_form().expect("hosted apps validate").id.clone();
        let state = self.open_locked(&hosted, &mut guard, &entry, Record::new()).await?;
        Ok((id, state))
    }

    /// Opens `form_id`. `nav_params` is `{"field": {...}, "global": {...}}`
    /// or a flat map of field ids of the target form.
    pub async fn open_form(&self, session_id: &str, form_id: &str, nav_params: Record) -> GatewayResult<FormState> {
        let session = self.session(session_id)?;
        let mut s = session.lock().await;
        let hosted = self.hosted_for(&s)?;
        let scoped = if nav_params.contains_key("field") || nav_params.contains_key("global") {
            nav_params
        } else {
            let mut m = Record::new();
            m.insert("field".into(), Json::Object(nav_params));
            m
        };
        self.open_locked(&hosted, &mut s, form_id, scoped).await
    }

    async fn open_locked(
        &self,
        hosted: &Hosted,
        s: &mut Session,
        form_id: &str,
        nav: Record,
    ) -> GatewayResult<FormState> {
        let app = &hosted.app;
        let form = app
            .form(form_id)
            .ok_or_else(|| GatewayError::UnknownForm(form_id.to_string()))?;
        s.diagnostics.clear();
        s.reset_form(form_id);
        let mut diags = Vec::new();
        apply(app, form, s, &nav, &mut diags);
        s.current_form = form_id.to_string();
        s.history.push(form_id.to_string());
        if let Some(adapter) = hosted.adapter(form_id, BindingRole::Prepopulate) {
            match self.call(adapter, s, form).await {
                Ok(out) => apply(app, form, s, &out, &mut diags),
                Err(e) => diags.push(failure(form_id, BindingRole::Prepopulate, &e)),
            }
        }
        s.diagnostics = diags;
        Ok(FormState::build(app, s))
    }

    /// Request transform, backend call, response transform.
    async fn call(&self, adapter: &AdapterSpec, s: &Session, form: &Form) -> Result<Record, InvokeError> {
        let request = transform(&adapter.request_mappings, &s.record(form))
            .map_err(|e| InvokeError::MalformedResponse(format!("request: {e}")))?;
        let body = match request.get("serviceInput") {
            Some(Json::Object(m)) => m.clone(),
            _ => Map::new(),
        };
        let response = invoke_adapter(&self.client, adapter, &body).await?;
        let mut source = Record::new();
        source.insert("serviceOutput".into(), Json::Object(response));
        transform(&adapter.response_mappings, &source).map_err(|e| InvokeError::MalformedResponse(e.to_string()))
    }

    pub async fn set_field(&self, session_id: &str, field_path: &str, value: &Json) -> GatewayResult<FormState> {
        let session = self.session(session_id)?;
        let mut s = session.lock().await;
        let hosted = self.hosted_for(&s)?;
        let form = hosted.app.form(&s.current_form).expect("current form exists");
        let field_id = match field_path.split_once('.') {
            Some((f, id)) if f == form.id => id,
            Some(_) => return Err(GatewayError::UnknownField(field_path.to_string())),
            None => field_path,
        };
        let field = form
            .field(field_id)
            .ok_or_else(|| GatewayError::UnknownField(field_path.to_string()))?;
        if !field.kind.is_scalar() {
            return Err(GatewayError::KindMismatch(format!(
                "`{field_id}` is a {} field",
                field.kind
            )));
        }
        if !field.editable {
            return Err(GatewayError::ReadOnlyField(field_path.to_string()));
        }
        let v = Value::from_json(field.kind, value).map_err(|e| GatewayError::KindMismatch(e.to_string()))?;
        s.diagnostics.clear();
        s.field_values.insert(Session::key(&form.id, field_id), v);
        Ok(FormState::build(&hosted.app, &s))
    }

    /// Follows the link on `nav_ref` (a button, or a table with `row_index`).
    pub async fn navigate(
        &self,
        session_id: &str,
        nav_ref: &str,
        row_index: Option<usize>,
    ) -> GatewayResult<FormState> {
        let session = self.session(session_id)?;
        let mut s = session.lock().await;
        let hosted = self.hosted_for(&s)?;
        let app = &hosted.app;
        let form = app.form(&s.current_form).expect("current form exists");
        let (field, link) = form
            .navigations()
            .find(|(f, _)| f.id == nav_ref)
            .ok_or_else(|| GatewayError::UnknownNavRef(nav_ref.to_string()))?;
        let mut source = s.record(form);
        if link.source_kind == NavSource::TableRow {
            let index = row_index.ok_or_else(|| GatewayError::RowIndexRequired(nav_ref.to_string()))?;
            let rows = s.rows(&form.id, &field.id);
            let row = rows.get(index).ok_or(GatewayError::RowOutOfRange {
                nav_ref: nav_ref.to_string(),
                index,
                rows: rows.len(),
            })?;
            source.insert("row".into(), crate::session::row_json(row));
        }
        let out = transform(&link.mappings, &source).map_err(|e| GatewayError::KindMismatch(e.to_string()))?;
        let mut diags = Vec::new();
        if let Some(Json::Object(globals)) = out.get("global") {
            set_globals(app, &mut s, globals, &mut diags);
        }
        let mut nav = Record::new();
        if let Some(fields) = out.get("field") {
            nav.insert("field".into(), fields.clone());
        }
        let target = link.target.clone();
        let mut state = self.open_locked(&hosted, &mut s, &target, nav).await?;
        if !diags.is_empty() {
            diags.append(&mut s.diagnostics);
            s.diagnostics = diags;
            state.diagnostics = s.diagnostics.clone();
        }
        Ok(state)
    }

    /// Sends the current form through its save adapter. Field values are
    /// kept whatever the outcome.
    pub async fn save(&self, session_id: &str) -> GatewayResult<SaveResult> {
        let session = self.session(session_id)?;
        let mut s = session.lock().await;
        let hosted = self.hosted_for(&s)?;
        let form = hosted.app.form(&s.current_form).expect("current form exists");
        let adapter = hosted
            .adapter(&form.id, BindingRole::Save)
            .ok_or_else(|| GatewayError::NoSaveService(form.id.clone()))?;
        let request = transform(&adapter.request_mappings, &s.record(form))
            .map_err(|e| GatewayError::KindMismatch(e.to_string()))?;
        let body = match request.get("serviceInput") {
            Some(Json::Object(m)) => m.clone(),
            _ => Map::new(),
        };
        match invoke_adapter(&self.client, adapter, &body).await {
            Ok(ack) => {
                s.diagnostics.clear();
                Ok(SaveResult {
                    form_id: form.id.clone(),
                    ack: Json::Object(ack),
                    diagnostics: vec![],
                })
            }
            Err(e) => {
                s.diagnostics = vec![failure(&form.id, BindingRole::Save, &e)];
                Err(GatewayError::AdapterFailure(e))
            }
        }
    }

    /// Runs the device capability attached to a field of the current form.
    pub async fn use_capability(&self, session_id: &str, field_id: &str) -> GatewayResult<FormState> {
        let session = self.session(session_id)?;
        let mut s = session.lock().await;
        let hosted = self.hosted_for(&s)?;
        let form = hosted.app.form(&s.current_form).expect("current form exists");
        let field = form
            .field(field_id)
            .ok_or_else(|| GatewayError::UnknownField(field_id.to_string()))?;
        let capability = field
            .capability
            .ok_or_else(|| GatewayError::NoCapability(field_id.to_string()))?;
        let key = Session::key(&form.id, field_id);
        let stubs = &self.capabilities;
        let produced = match capability {
            Capability::Location => stubs.location.clone().map(Value::Text),
            Capability::Camera => stubs.photo.clone().map(Value::Photo),
            Capability::Dialer if stubs.dialer => {
                let number = s.value(&form.id, field_id).as_text().unwrap_or_default().to_string();
                stubs.dialed.lock().unwrap().push(number);
                s.diagnostics.clear();
                return Ok(FormState::build(&hosted.app, &s));
            }
            Capability::Dialer => None,
        };
        s.diagnostics = match produced {
            Some(v) => {
                s.field_values.insert(key, v);
                vec![]
            }
            None => vec![Diagnostic::warning(
                CAPABILITY_UNAVAILABLE,
                format!("/forms/{}/fields/{field_id}", form.id),
                format!("device has no {capability:?} provider; field stays a plain value"),
            )],
        };
        Ok(FormState::build(&hosted.app, &s))
    }

    pub async fn snapshot(&self, session_id: &str) -> GatewayResult<Session> {
        Ok(self.session(session_id)?.lock().await.clone())
    }

    pub async fn form_state(&self, session_id: &str) -> GatewayResult<FormState> {
        let session = self.session(session_id)?;
        let s = session.lock().await;
        let hosted = self.hosted_for(&s)?;
        Ok(FormState::build(&hosted.app, &s))
    }
}

fn failure(form: &str, role: BindingRole, e: &InvokeError) -> Diagnostic {
    Diagnostic::error(ADAPTER_FAILURE, format!("/forms/{form}/{role}"), e.to_string())
}

/// Stores a `{"field": ..., "global": ...}` record into the session for `form`.
fn apply(app: &Application, form: &Form, s: &mut Session, rec: &Record, diags: &mut Vec<Diagnostic>) {
    if let Some(Json::Object(fields)) = rec.get("field") {
        for (id, json) in fields {
            let Some(field) = form.field(id) else {
                diags.push(dropped(&form.id, id, "no such field"));
                continue;
            };
            match field.kind {
                FieldKind::Table => {
                    let items = json.as_array().cloned().unwrap_or_default();
                    let rows: Vec<Row> = items
                        .iter()
                        .map(|item| {
                            field
                                .columns
                                .iter()
                                .filter_map(|c| {
                                    let v = item.get(&c.id)?;
                                    match Value::from_json(c.kind, v) {
                                        Ok(v) => Some((c.id.clone(), v)),
                                        Err(e) => {
                                            diags.push(dropped(&form.id, &format!("{id}.{}", c.id), &e.to_string()));
                                            None
                                        }
                                    }
                                })
                                .collect()
                        })
                        .collect();
                    s.table_rows.insert(Session::key(&form.id, id), rows);
                }
                FieldKind::Button => diags.push(dropped(&form.id, id, "buttons carry no value")),
                kind => match Value::from_json(kind, json) {
                    Ok(v) => {
                        s.field_values.insert(Session::key(&form.id, id), v);
                    }
                    Err(e) => diags.push(dropped(&form.id, id, &e.to_string())),
                },
            }
        }
    }
    if let Some(Json::Object(globals)) = rec.get("global") {
        set_globals(app, s, globals, diags);
    }
}

fn set_globals(app: &Application, s: &mut Session, globals: &Map<String, Json>, diags: &mut Vec<Diagnostic>) {
    for (name, json) in globals {
        let Some(g) = app.global(name) else {
            diags.push(dropped("", name, "no such global"));
            continue;
        };
        match Value::from_json(g.kind, json) {
            Ok(v) => {
                s.globals.insert(name.clone(), v);
            }
            Err(e) => diags.push(dropped("", name, &e.to_string())),
        }
    }
}

fn dropped(form: &str, id: &str, why: &str) -> Diagnostic {
    let at = if form.is_empty() {
        format!("/globals/{id}")
    } else {
        format!("/forms/{form}/fields/{id}")
    };
    Diagnostic::warning(VALUE_DROPPED, at, format!("value for `{id}` dropped: {why}"))
}

/// Reply body for gateway errors.
pub fn error_body(e: &GatewayError) -> Json {
    json!({ "code": e.code(), "message": e.to_string() })
}
