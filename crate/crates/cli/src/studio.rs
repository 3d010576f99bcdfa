//! HTTP API behind the visual builder.
//!
//! ```text
//! GET  /apps                      -> app ids
//! GET  /apps/{id}                 -> {app, diagnostics}
//! PUT  /apps/{id}      document   -> {version, diagnostics}
//! POST /apps/{id}/edits {baseVersion?, op, target, payload} -> {version, app, inverse, diagnostics}
//! GET  /catalogue?filter=         -> registry service rows
//! POST /deploy {appId, targets}   -> {bundles: [{bundleId, target, checksum}]}
//! GET  /deployments               -> deployed app catalogue
//! GET  /preview                   -> {sessionId, formState} on the preview bundle
//! ```
//!
//! The server is the only validator: every response that changes a model
//! carries the full validate + lint result for it.

use std::collections::BTreeMap;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::sync::Mutex;

use screenforge_core::diag::Diagnostic;
use screenforge_core::workspace::Workspace;
use screenforge_core::{apply_edit, lint, parse_app, Application, Catalogue, EditCommand, Target};
use screenforge_gateway::Gateway;
use screenforge_registry::Registry;

use crate::pipeline::{self, Snapshot};

pub struct Studio {
    apps: Mutex<BTreeMap<String, Application>>,
    deploy_lock: Mutex<()>,
    registry: Arc<Registry>,
    workspace: Workspace,
    gateway: Arc<Gateway>,
    preview_bundle: std::sync::Mutex<Option<String>>,
}

impl Studio {
    pub fn new(registry: Arc<Registry>, workspace: Workspace, gateway: Arc<Gateway>) -> Self {
        Self {
            apps: Mutex::new(BTreeMap::new()),
            deploy_lock: Mutex::new(()),
            registry,
            workspace,
            gateway,
            preview_bundle: std::sync::Mutex::new(None),
        }
    }

    pub async fn insert_app(&self, app: Application) {
        self.apps.lock().await.insert(app.name.clone(), app);
    }

    pub fn set_preview(&self, bundle_id: String) {
        *self.preview_bundle.lock().unwrap() = Some(bundle_id);
    }

    async fn diagnostics(&self, app: &Application) -> Vec<Diagnostic> {
        let snapshot = Snapshot::of(&self.registry).await;
        let mut diags = screenforge_core::validate(app, &snapshot.descriptors);
        diags.extend(lint(app));
        diags
    }
}

struct ApiError(StatusCode, Value);

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self(status, json!({ "code": code, "message": message.into() }))
    }

    fn diagnostics(status: StatusCode, code: &str, diags: &[Diagnostic]) -> Self {
        Self(status, json!({ "code": code, "diagnostics": diags }))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(self.1)).into_response()
    }
}

type ApiResult = Result<Json<Value>, ApiError>;
type St = State<Arc<Studio>>;

pub fn router(studio: Arc<Studio>) -> Router {
    Router::new()
        .route("/apps", get(list_apps))
        .route("/apps/{id}", get(get_app).put(put_app))
        .route("/apps/{id}/edits", post(edit_app))
        .route("/catalogue", get(catalogue))
        .route("/deploy", post(deploy))
        .route("/deployments", get(deployments))
        .route("/preview", get(preview))
        .with_state(studio)
}

fn unknown_app(id: &str) -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "UNKNOWN_APP", format!("no app `{id}`"))
}

fn to_json(app: &Application) -> Value {
    serde_json::to_value(app).expect("applications serialize")
}

async fn list_apps(State(s): St) -> Json<Vec<String>> {
    Json(s.apps.lock().await.keys().cloned().collect())
}

async fn get_app(State(s): St, Path(id): Path<String>) -> ApiResult {
    let app = s.apps.lock().await.get(&id).cloned().ok_or_else(|| unknown_app(&id))?;
    let diagnostics = s.diagnostics(&app).await;
    Ok(Json(json!({ "app": to_json(&app), "diagnostics": diagnostics })))
}

async fn put_app(State(s): St, Path(id): Path<String>, Json(document): Json<Value>) -> ApiResult {
    let app = parse_app(&document.to_string())
        .map_err(|d| ApiError::diagnostics(StatusCode::UNPROCESSABLE_ENTITY, "INVALID_APP", &d))?;
    {
        let mut apps = s.apps.lock().await;
        if let Some(current) = apps.get(&id) {
            if app.version < current.version {
                return Err(ApiError::new(
                    StatusCode::CONFLICT,
                    "VERSION_CONFLICT",
                    format!("server has version {}, document has {}", current.version, app.version),
                ));
            }
        }
        apps.insert(id, app.clone());
    }
    let diagnostics = s.diagnostics(&app).await;
    Ok(Json(json!({ "version": app.version, "diagnostics": diagnostics })))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct EditBody {
    #[serde(default)]
    base_version: Option<u64>,
    #[serde(flatten)]
    command: EditCommand,
}

async fn edit_app(State(s): St, Path(id): Path<String>, Json(body): Json<EditBody>) -> ApiResult {
    let next = {
        let mut apps = s.apps.lock().await;
        let current = apps.get(&id);
        if current.is_none() && body.command.op != screenforge_core::EditOp::CreateApp {
            return Err(unknown_app(&id));
        }
        if let (Some(cur), Some(base)) = (current, body.base_version) {
            if cur.version != base {
                return Err(ApiError::new(
                    StatusCode::CONFLICT,
                    "VERSION_CONFLICT",
                    format!("edit based on version {base}, server has {}", cur.version),
                ));
            }
        }
        let before = current.cloned().unwrap_or_else(|| Application::blank(id.clone()));
        let next = apply_edit(&before, &body.command)
            .map_err(|d| ApiError::diagnostics(StatusCode::UNPROCESSABLE_ENTITY, &d.code.clone(), &[d]))?;
        let inverse = body.command.inverse(&before);
        apps.insert(id, next.clone());
        (next, inverse)
    };
    let (app, inverse) = next;
    let diagnostics = s.diagnostics(&app).await;
    Ok(Json(json!({
        "version": app.version,
        "app": to_json(&app),
        "inverse": inverse,
        "diagnostics": diagnostics,
    })))
}

#[derive(Deserialize)]
struct CatalogueQuery {
    filter: Option<String>,
}

async fn catalogue(State(s): St, Query(q): Query<CatalogueQuery>) -> Json<Value> {
    Json(json!(s.registry.list_catalogue(q.filter.as_deref()).await))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct DeployBody {
    app_id: String,
    #[serde(default = "both_targets")]
    targets: Vec<Target>,
}

fn both_targets() -> Vec<Target> {
    vec![Target::Ios, Target::Android]
}

async fn deploy(State(s): St, Json(body): Json<DeployBody>) -> ApiResult {
    let app = s
        .apps
        .lock()
        .await
        .get(&body.app_id)
        .cloned()
        .ok_or_else(|| unknown_app(&body.app_id))?;
    let snapshot = Snapshot::of(&s.registry).await;
    let _writer = s.deploy_lock.lock().await;
    let (bundles, adapters) = pipeline::deploy(&s.workspace, &app, &body.targets, &snapshot).map_err(|e| {
        let status = if e.is_environment() {
            StatusCode::INTERNAL_SERVER_ERROR
        } else {
            StatusCode::UNPROCESSABLE_ENTITY
        };
        ApiError::diagnostics(status, "DEPLOY_FAILED", &e.diagnostics())
    })?;
    let mut out = Vec::new();
    for b in bundles {
        out.push(json!({ "bundleId": b.bundle_id, "target": b.target, "checksum": b.checksum }));
        s.gateway
            .host(b, &adapters)
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.code(), e.to_string()))?;
    }
    Ok(Json(json!({ "bundles": out })))
}

async fn deployments(State(s): St) -> ApiResult {
    let catalogue = Catalogue::open(s.workspace.catalogue_file())
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.code(), e.to_string()))?;
    Ok(Json(json!(catalogue.list())))
}

async fn preview(State(s): St) -> ApiResult {
    let bundle = s.preview_bundle.lock().unwrap().clone();
    let bundle = bundle.ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "NO_PREVIEW", "not in preview mode"))?;
    let (id, state) = s
        .gateway
        .start_session(&bundle)
        .await
        .map_err(|e| ApiError::new(StatusCode::BAD_GATEWAY, e.code(), e.to_string()))?;
    Ok(Json(json!({ "sessionId": id, "formState": state })))
}
