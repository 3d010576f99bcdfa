//! HTTP face of the gateway.
//!
//! ```text
//! POST /sessions                    {bundleId}             -> {sessionId, formState}
//! POST /sessions/{id}/open          {formId, navParams?}   -> formState
//! POST /sessions/{id}/fields        {fieldPath, value}     -> formState
//! POST /sessions/{id}/navigate      {navRef, rowIndex?}    -> formState
//! POST /sessions/{id}/save          {}                     -> saveResult
//! POST /sessions/{id}/capability    {fieldPath}            -> formState
//! GET  /sessions/{id}                                      -> session snapshot
//! GET  /bundles                                            -> hosted bundle ids
//! ```

use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::runtime::{error_body, Gateway, GatewayError};

impl IntoResponse for GatewayError {
    fn into_response(self) -> Response {
        let status = match &self {
            GatewayError::UnknownBundle(_) | GatewayError::UnknownSession(_) | GatewayError::UnknownForm(_) => {
                StatusCode::NOT_FOUND
            }
            GatewayError::AdapterFailure(_) => StatusCode::BAD_GATEWAY,
            GatewayError::MissingAdapter(_)
            | GatewayError::ChecksumMismatch(_)
            | GatewayError::InvalidBundle(_)
            | GatewayError::Workspace(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        (status, Json(error_body(&self))).into_response()
    }
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct StartBody {
    bundle_id: String,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct OpenBody {
    form_id: String,
    #[serde(default)]
    nav_params: Map<String, Value>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct FieldBody {
    field_path: String,
    #[serde(default)]
    value: Value,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct NavigateBody {
    nav_ref: String,
    #[serde(default)]
    row_index: Option<usize>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct CapabilityBody {
    field_path: String,
}

type Gw = State<Arc<Gateway>>;

pub fn router(gateway: Arc<Gateway>) -> Router {
    Router::new()
        .route("/bundles", get(bundles))
        .route("/sessions", post(start))
        .route("/sessions/{id}", get(snapshot))
        .route("/sessions/{id}/open", post(open))
        .route("/sessions/{id}/fields", post(set_field))
        .route("/sessions/{id}/navigate", post(navigate))
        .route("/sessions/{id}/save", post(save))
        .route("/sessions/{id}/capability", post(capability))
        .with_state(gateway)
}

async fn bundles(State(gw): Gw) -> Json<Vec<String>> {
    Json(gw.bundle_ids())
}

async fn start(State(gw): Gw, Json(body): Json<StartBody>) -> Result<Json<Value>, GatewayError> {
    let (id, state) = gw.start_session(&body.bundle_id).await?;
    Ok(Json(json!({ "sessionId": id, "formState": state })))
}

async fn snapshot(State(gw): Gw, Path(id): Path<String>) -> Result<Json<Value>, GatewayError> {
    Ok(Json(
        serde_json::to_value(gw.snapshot(&id).await?).expect("session serializes"),
    ))
}

async fn open(State(gw): Gw, Path(id): Path<String>, Json(body): Json<OpenBody>) -> Result<Response, GatewayError> {
    Ok(Json(gw.open_form(&id, &body.form_id, body.nav_params).await?).into_response())
}

async fn set_field(
    State(gw): Gw,
    Path(id): Path<String>,
    Json(body): Json<FieldBody>,
) -> Result<Response, GatewayError> {
    Ok(Json(gw.set_field(&id, &body.field_path, &body.value).await?).into_response())
}

async fn navigate(
    State(gw): Gw,
    Path(id): Path<String>,
    Json(body): Json<NavigateBody>,
) -> Result<Response, GatewayError> {
    Ok(Json(gw.navigate(&id, &body.nav_ref, body.row_index).await?).into_response())
}

async fn save(State(gw): Gw, Path(id): Path<String>) -> Result<Response, GatewayError> {
    Ok(Json(gw.save(&id).await?).into_response())
}

async fn capability(
    State(gw): Gw,
    Path(id): Path<String>,
    Json(body): Json<CapabilityBody>,
) -> Result<Response, GatewayError> {
    Ok(Json(gw.use_capability(&id, &body.field_path).await?).into_response())
}
