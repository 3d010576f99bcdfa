//! A small enterprise backend for tests and demos.
//!
//! Serves the discovery protocol (`GET /services`, `GET /services/{id}/descriptor`),
//! the five TechSupport operations under `POST /invoke/{id}`, and two admin
//! endpoints: `GET /admin/log` returns every invocation seen so far and
//! `POST /admin/fault` switches failure injection.
//!
//! Invocation bodies are the bare input record (`{"contactId": "42"}`) and
//! responses are the bare output record.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::extract::{ConnectInfo, Path, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use tokio::net::TcpListener;
use tokio::task::JoinHandle;

use screenforge_core::descriptor::{parse_descriptor, ParamKind};
use screenforge_core::fixtures::TECHSUPPORT_SERVICES;

/// Seed content checked into the repository.
pub const TECHSUPPORT_SEED: &str = include_str!("../fixtures/techsupport.seed.json");

/// Request header a gateway sets so the log can tell mediated calls apart.
pub const VIA_HEADER: &str = "x-screenforge-via";

/// How long `hang` mode stalls before answering.
pub const HANG: Duration = Duration::from_secs(10);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Contact {
    pub contact_id: String,
    pub first_name: String,
    pub last_name: String,
    pub phone: String,
    pub address: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Ticket {
    pub ticket_id: String,
    pub contact_id: String,
    pub date: String,
    pub status: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HistoryEntry {
    pub ticket_id: String,
    pub date: String,
    pub status: String,
    #[serde(default)]
    pub notes: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dataset {
    pub contacts: Vec<Contact>,
    pub tickets: Vec<Ticket>,
    pub history: Vec<HistoryEntry>,
}

impl Dataset {
    pub fn techsupport() -> Self {
        serde_json::from_str(TECHSUPPORT_SEED).expect("seed parses")
    }

    /// Every ticket names a known contact and every history entry a known
    /// ticket.
    pub fn check_integrity(&self) -> Result<(), String> {
        for t in &self.tickets {
            if !self.contacts.iter().any(|c| c.contact_id == t.contact_id) {
                return Err(format!("ticket {} names unknown contact {}", t.ticket_id, t.contact_id));
            }
        }
        for h in &self.history {
            if !self.tickets.iter().any(|t| t.ticket_id == h.ticket_id) {
                return Err(format!("history entry names unknown ticket {}", h.ticket_id));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LogEntry {
    pub service_id: String,
    pub request: Value,
    pub timestamp: String,
    pub source_address: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub via: Option<String>,
    pub status: u16,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fault {
    #[default]
    Off,
    /// Every invocation answers 500.
    On,
    /// Every invocation stalls for [`HANG`] first.
    Hang,
    /// Every invocation answers 200 with a body that is not JSON.
    Garbage,
}

#[derive(Debug)]
struct Inner {
    documents: Vec<Value>,
    data: Mutex<Dataset>,
    log: Mutex<Vec<LogEntry>>,
    fault: Mutex<Fault>,
}

/// Shared backend state. Cloning shares it.
#[derive(Debug, Clone)]
pub struct BackendSim {
    inner: Arc<Inner>,
}

impl BackendSim {
    /// The TechSupport backend with seed data.
    pub fn techsupport() -> Self {
        let docs = serde_json::from_str(TECHSUPPORT_SERVICES).expect("services parse");
        Self::new(docs, Dataset::techsupport())
    }

    /// A backend advertising exactly `documents`, valid or not.
    pub fn new(documents: Vec<Value>, data: Dataset) -> Self {
        Self {
            inner: Arc::new(Inner {
                documents,
                data: Mutex::new(data),
                log: Mutex::new(Vec::new()),
                fault: Mutex::new(Fault::Off),
            }),
        }
    }

    pub fn log(&self) -> Vec<LogEntry> {
        self.inner.log.lock().unwrap().clone()
    }

    pub fn dataset(&self) -> Dataset {
        self.inner.data.lock().unwrap().clone()
    }

    pub fn set_fault(&self, fault: Fault) {
        *self.inner.fault.lock().unwrap() = fault;
    }

    pub fn router(&self) -> Router {
        Router::new()
            .route("/services", get(list_services))
            .route("/services/{id}/descriptor", get(descriptor))
            .route("/invoke/{id}", post(invoke))
            .route("/admin/log", get(admin_log))
            .route("/admin/fault", post(admin_fault))
            .with_state(self.clone())
    }

    /// Serves on `listener` until the task is aborted.
    pub fn serve(&self, listener: TcpListener) -> JoinHandle<()> {
        let app = self.router().into_make_service_with_connect_info::<SocketAddr>();
        tokio::spawn(async move {
            let _ = axum::serve(listener, app).await;
        })
    }

    /// Binds `addr` (port 0 picks a free one) and serves in the background.
    pub async fn spawn(&self, addr: &str) -> std::io::Result<RunningSim> {
        let listener = TcpListener::bind(addr).await?;
        let addr = listener.local_addr()?;
        let task = self.serve(listener);
        Ok(RunningSim {
            addr,
            sim: self.clone(),
            task,
        })
    }

    fn document(&self, id: &str) -> Option<&Value> {
        self.inner
            .documents
            .iter()
            .find(|d| d.get("serviceId").and_then(Value::as_str) == Some(id))
    }
}

/// A backend bound to a socket. Dropping it stops the server.
#[derive(Debug)]
pub struct RunningSim {
    pub addr: SocketAddr,
    pub sim: BackendSim,
    task: JoinHandle<()>,
}

impl RunningSim {
    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }
}

impl Drop for RunningSim {
    fn drop(&mut self) {
        self.task.abort();
    }
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(json!({ "error": message.into() }))).into_response()
}

async fn list_services(State(sim): State<BackendSim>) -> Json<Vec<String>> {
    Json(
        sim.inner
            .documents
            .iter()
            .filter_map(|d| d.get("serviceId").and_then(Value::as_str).map(str::to_string))
            .collect(),
    )
}

async fn descriptor(State(sim): State<BackendSim>, Path(id): Path<String>) -> Response {
    match sim.document(&id) {
        Some(doc) => Json(doc.clone()).into_response(),
        None => error(StatusCode::NOT_FOUND, format!("unknown service `{id}`")),
    }
}

async fn admin_log(State(sim): State<BackendSim>) -> Json<Vec<LogEntry>> {
    Json(sim.log())
}

#[derive(Deserialize)]
struct FaultBody {
    mode: Fault,
}

async fn admin_fault(State(sim): State<BackendSim>, Json(body): Json<FaultBody>) -> Json<Value> {
    sim.set_fault(body.mode);
    Json(json!({ "mode": body.mode }))
}

async fn invoke(
    State(sim): State<BackendSim>,
    ConnectInfo(peer): ConnectInfo<SocketAddr>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: String,
) -> Response {
    let request: Value = serde_json::from_str(&body).unwrap_or(Value::String(body));
    let fault = *sim.inner.fault.lock().unwrap();
    if fault == Fault::Hang {
        tokio::time::sleep(HANG).await;
    }
    let response = match fault {
        Fault::On => error(StatusCode::INTERNAL_SERVER_ERROR, "injected fault"),
        Fault::Garbage => (StatusCode::OK, "<html>not a record</html>").into_response(),
        Fault::Off | Fault::Hang => answer(&sim, &id, &request),
    };
    sim.inner.log.lock().unwrap().push(LogEntry {
        service_id: id,
        request,
        timestamp: chrono::Utc::now().to_rfc3339(),
        source_address: peer.ip().to_string(),
        via: headers
            .get(VIA_HEADER)
            .and_then(|v| v.to_str().ok())
            .map(str::to_string),
        status: response.status().as_u16(),
    });
    response
}

fn answer(sim: &BackendSim, id: &str, request: &Value) -> Response {
    let Some(doc) = sim.document(id) else {
        return error(StatusCode::NOT_FOUND, format!("unknown service `{id}`"));
    };
    let Some(input) = request.as_object() else {
        return error(StatusCode::BAD_REQUEST, "request body must be a record");
    };
    let args = match inputs(doc, input) {
        Ok(args) => args,
        Err(msg) => return error(StatusCode::BAD_REQUEST, msg),
    };
    let arg = |name: &str| args.get(name).cloned().unwrap_or_default();
    let mut data = sim.inner.data.lock().unwrap();
    let result = match id {
        "getSchedule" => Ok(schedule(&data)),
        "getCustomer" => data
            .contacts
            .iter()
            .find(|c| c.contact_id == arg("contactId"))
            .map(|c| serde_json::to_value(c).unwrap())
            .ok_or_else(|| format!("no contact `{}`", arg("contactId"))),
        "getTicket" => data
            .tickets
            .iter()
            .find(|t| t.ticket_id == arg("ticketId"))
            .map(|t| serde_json::to_value(t).unwrap())
            .ok_or_else(|| format!("no ticket `{}`", arg("ticketId"))),
        "getTicketHistory" => {
            let ticket = arg("ticketId");
            let mut rows: Vec<&HistoryEntry> = data.history.iter().filter(|h| h.ticket_id == ticket).collect();
            rows.sort_by(|a, b| a.date.cmp(&b.date));
            Ok(json!({ "history": rows }))
        }
        "saveSummary" => {
            let ticket = arg("ticketId");
            if data.tickets.iter().any(|t| t.ticket_id == ticket) {
                data.history.push(HistoryEntry {
                    ticket_id: ticket,
                    date: arg("date"),
                    status: arg("status"),
                    notes: arg("notes"),
                });
                Ok(json!({ "ack": format!("saved #{}", data.history.len()) }))
            } else {
                Err(format!("no ticket `{ticket}`"))
            }
        }
        _ => return error(StatusCode::NOT_IMPLEMENTED, format!("`{id}` has no implementation")),
    };
    match result {
        Ok(v) => Json(v).into_response(),
        Err(msg) => error(StatusCode::NOT_FOUND, msg),
    }
}

/// Scalar inputs as text, checked against the descriptor's required flags.
fn inputs(doc: &Value, input: &Map<String, Value>) -> Result<HashMap<String, String>, String> {
    let descriptor = parse_descriptor(doc).map_err(|e| e.to_string())?;
    let mut args = HashMap::new();
    for p in &descriptor.inputs {
        let ParamKind::Scalar(_) = p.kind else { continue };
        let text = match input.get(&p.name) {
            Some(Value::String(s)) => Some(s.clone()),
            Some(Value::Number(n)) => Some(n.to_string()),
            Some(Value::Bool(b)) => Some(b.to_string()),
            _ => None,
        };
        match text {
            Some(t) => {
                args.insert(p.name.clone(), t);
            }
            None if p.required => return Err(format!("missing required input `{}`", p.name)),
            None => {}
        }
    }
    Ok(args)
}

/// Open and in-progress tickets with the contact's last name, by date then
/// ticket id.
fn schedule(data: &Dataset) -> Value {
    let mut tickets: Vec<&Ticket> = data.tickets.iter().filter(|t| t.status != "closed").collect();
    tickets.sort_by(|a, b| (&a.date, &a.ticket_id).cmp(&(&b.date, &b.ticket_id)));
    let rows: Vec<Value> = tickets
        .into_iter()
        .map(|t| {
            let last = data
                .contacts
                .iter()
                .find(|c| c.contact_id == t.contact_id)
                .map(|c| c.last_name.as_str())
                .unwrap_or_default();
            json!({"contactId": t.contact_id, "ticketId": t.ticket_id, "lastName": last, "date": t.date})
        })
        .collect();
    json!({ "contacts": rows })
}
