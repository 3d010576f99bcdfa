//! Backend discovery and the design-time service catalogue.
//!
//! Discovery handshake: `GET <endpoint>/services` answers a JSON array of
//! service ids, `GET <endpoint>/services/{id}/descriptor` one descriptor.
//! Descriptors are accepted only if they pass [`parse_descriptor`], which
//! enforces [`DESCRIPTOR_SCHEMA`] plus the rules the schema cannot express.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use tokio::sync::{Mutex, RwLock};

use screenforge_core::descriptor::{parse_descriptor, system_id_for, DescriptorError, Protocol, ServiceDescriptor};
use screenforge_core::dsl::to_canonical_json;
use screenforge_core::workspace::write_atomic;

pub use screenforge_core::binding::check_binding;

/// JSON Schema for descriptor documents.
pub const DESCRIPTOR_SCHEMA: &str = include_str!("../descriptor.schema");

pub const TIMEOUT: Duration = Duration::from_secs(5);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BackendSystem {
    pub system_id: String,
    pub display_name: String,
    pub discovery_endpoint: String,
    pub protocol: Protocol,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CatalogueRow {
    pub system_id: String,
    pub service_id: String,
    pub name: String,
    pub description: String,
}

#[derive(Debug, thiserror::Error)]
pub enum RegistryError {
    #[error("UNREACHABLE: {0}")]
    Unreachable(String),
    #[error("BAD_HANDSHAKE: {0}")]
    BadHandshake(String),
    #[error("UNKNOWN_SYSTEM: `{0}` is not registered")]
    UnknownSystem(String),
    #[error("INVALID_ENDPOINT: {0}")]
    InvalidEndpoint(String),
    #[error("registry workspace: {0}")]
    Io(#[from] std::io::Error),
    #[error("registry workspace is corrupt: {0}")]
    Corrupt(#[from] serde_json::Error),
}

impl RegistryError {
    pub fn code(&self) -> &'static str {
        match self {
            RegistryError::Unreachable(_) => "UNREACHABLE",
            RegistryError::BadHandshake(_) => "BAD_HANDSHAKE",
            RegistryError::UnknownSystem(_) => "UNKNOWN_SYSTEM",
            RegistryError::InvalidEndpoint(_) => "INVALID_ENDPOINT",
            RegistryError::Io(_) | RegistryError::Corrupt(_) => "WORKSPACE_IO",
        }
    }

    /// Network-side failures, as opposed to bad input.
    pub fn is_network(&self) -> bool {
        matches!(self, RegistryError::Unreachable(_) | RegistryError::BadHandshake(_))
    }
}

/// Outcome of one discovery: accepted descriptors plus one
/// `INVALID_DESCRIPTOR` per rejected document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscoverReport {
    pub descriptors: Vec<ServiceDescriptor>,
    pub rejected: Vec<DescriptorError>,
}

impl DiscoverReport {
    pub const INVALID_DESCRIPTOR: &'static str = "INVALID_DESCRIPTOR";
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct SystemRecord {
    system: BackendSystem,
    #[serde(default)]
    descriptors: Vec<ServiceDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fetched_at: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
struct State {
    systems: Vec<SystemRecord>,
}

impl State {
    fn record(&self, system_id: &str) -> Option<&SystemRecord> {
        self.systems.iter().find(|r| r.system.system_id == system_id)
    }

    fn record_mut(&mut self, system_id: &str) -> Option<&mut SystemRecord> {
        self.systems.iter_mut().find(|r| r.system.system_id == system_id)
    }
}

/// The registry. Reads run concurrently; writes to the workspace file are
/// serialized. Network calls never hold the state lock.
#[derive(Debug)]
pub struct Registry {
    path: Option<PathBuf>,
    state: RwLock<State>,
    writer: Mutex<()>,
    client: reqwest::Client,
}

impl Registry {
    pub fn in_memory() -> Self {
        Self::with_state(None, State::default())
    }

    /// Loads `path` (a missing file is an empty registry).
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, RegistryError> {
        let path = path.into();
        let state = match std::fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str(&text)?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => State::default(),
            Err(e) => return Err(e.into()),
        };
        Ok(Self::with_state(Some(path), state))
    }

    fn with_state(path: Option<PathBuf>, state: State) -> Self {
        Self {
            path,
            state: RwLock::new(state),
            writer: Mutex::new(()),
            client: reqwest::Client::builder()
                .timeout(TIMEOUT)
                .build()
                .expect("http client"),
        }
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    async fn fetch(&self, url: &str) -> Result<reqwest::Response, RegistryError> {
        self.client
            .get(url)
            .send()
            .await
            .map_err(|e| RegistryError::Unreachable(format!("{url}: {e}")))
    }

    async fn service_ids(&self, endpoint: &str) -> Result<Vec<String>, RegistryError> {
        let url = format!("{endpoint}/services");
        let resp = self.fetch(&url).await?;
        if !resp.status().is_success() {
            return Err(RegistryError::BadHandshake(format!("{url} answered {}", resp.status())));
        }
        let text = resp
            .text()
            .await
            .map_err(|e| RegistryError::Unreachable(format!("{url}: {e}")))?;
        serde_json::from_str(&text)
            .map_err(|_| RegistryError::BadHandshake(format!("{url} did not answer a list of service ids")))
    }

    /// Performs the handshake and records the system under its derived id.
    /// Registering the same host and path again updates name and endpoint.
    pub async fn register_system(&self, endpoint: &str, display_name: &str) -> Result<BackendSystem, RegistryError> {
        let url = url::Url::parse(endpoint).map_err(|e| RegistryError::InvalidEndpoint(format!("{endpoint}: {e}")))?;
        if !matches!(url.scheme(), "http" | "https") || url.host_str().is_none() {
            return Err(RegistryError::InvalidEndpoint(endpoint.to_string()));
        }
        let endpoint = endpoint.trim_end_matches('/').to_string();
        self.service_ids(&endpoint).await?;
        let system = BackendSystem {
            system_id: system_id_for(&url),
            display_name: display_name.to_string(),
            discovery_endpoint: endpoint,
            protocol: Protocol::HttpJson,
        };
        self.update(|state| match state.record_mut(&system.system_id) {
            Some(r) => r.system = system.clone(),
            None => state.systems.push(SystemRecord {
                system: system.clone(),
                descriptors: Vec::new(),
                fetched_at: None,
            }),
        })
        .await?;
        Ok(system)
    }

    /// Full refresh of one system's descriptors. Invalid documents are
    /// reported and left out; the others replace the cached set.
    pub async fn discover(&self, system_id: &str) -> Result<DiscoverReport, RegistryError> {
        let endpoint = self
            .system(system_id)
            .await
            .ok_or_else(|| RegistryError::UnknownSystem(system_id.to_string()))?
            .discovery_endpoint;
        let ids = self.service_ids(&endpoint).await?;
        let mut report = DiscoverReport {
            descriptors: Vec::new(),
            rejected: Vec::new(),
        };
        for id in ids {
            let url = format!("{endpoint}/services/{id}/descriptor");
            let resp = self.fetch(&url).await?;
            let reject = |reason: String| DescriptorError {
                service_id: id.clone(),
                reason,
            };
            if !resp.status().is_success() {
                report
                    .rejected
                    .push(reject(format!("descriptor fetch answered {}", resp.status())));
                continue;
            }
            let text = resp
                .text()
                .await
                .map_err(|e| RegistryError::Unreachable(format!("{url}: {e}")))?;
            let doc: Value = match serde_json::from_str(&text) {
                Ok(doc) => doc,
                Err(e) => {
                    report.rejected.push(reject(format!("not JSON: {e}")));
                    continue;
                }
            };
            match parse_descriptor(&doc) {
                Ok(d) if d.service_id != id => {
                    report
                        .rejected
                        .push(reject(format!("document describes `{}`", d.service_id)));
                }
                Ok(mut d) => {
                    d.system_id = system_id.to_string();
                    report.descriptors.push(d);
                }
                Err(e) => report.rejected.push(e),
            }
        }
        report.descriptors.sort_by(|a, b| a.service_id.cmp(&b.service_id));
        let fetched = chrono::Utc::now().to_rfc3339();
        let accepted = report.descriptors.clone();
        self.update(|state| {
            if let Some(r) = state.record_mut(system_id) {
                r.descriptors = accepted;
                r.fetched_at = Some(fetched);
            }
        })
        .await?;
        Ok(report)
    }

    async fn update(&self, change: impl FnOnce(&mut State)) -> Result<(), RegistryError> {
        let _writer = self.writer.lock().await;
        let snapshot = {
            let mut state = self.state.write().await;
            change(&mut state);
            state
                .systems
                .sort_by(|a, b| a.system.system_id.cmp(&b.system.system_id));
            state.clone()
        };
        if let Some(path) = &self.path {
            let text = to_canonical_json(&serde_json::to_value(&snapshot)?);
            write_atomic(path, text.as_bytes())?;
        }
        Ok(())
    }

    pub async fn system(&self, system_id: &str) -> Option<BackendSystem> {
        self.state.read().await.record(system_id).map(|r| r.system.clone())
    }

    pub async fn systems(&self) -> Vec<BackendSystem> {
        self.state
            .read()
            .await
            .systems
            .iter()
            .map(|r| r.system.clone())
            .collect()
    }

    /// Every accepted descriptor, ordered by system then service.
    pub async fn descriptors(&self) -> Vec<ServiceDescriptor> {
        let state = self.state.read().await;
        let mut out: Vec<ServiceDescriptor> = state.systems.iter().flat_map(|r| r.descriptors.clone()).collect();
        out.sort_by(|a, b| (&a.system_id, &a.service_id).cmp(&(&b.system_id, &b.service_id)));
        out
    }

    pub async fn descriptor(&self, system_id: &str, service_id: &str) -> Option<ServiceDescriptor> {
        self.state
            .read()
            .await
            .record(system_id)?
            .descriptors
            .iter()
            .find(|d| d.service_id == service_id)
            .cloned()
    }

    pub async fn fetched_at(&self, system_id: &str) -> Option<String> {
        self.state.read().await.record(system_id)?.fetched_at.clone()
    }

    /// Catalogue rows ordered by (systemId, serviceId), optionally for one
    /// system.
    pub async fn list_catalogue(&self, filter: Option<&str>) -> Vec<CatalogueRow> {
        self.descriptors()
            .await
            .into_iter()
            .filter(|d| filter.is_none_or(|f| d.system_id == f))
            .map(|d| CatalogueRow {
                system_id: d.system_id,
                service_id: d.service_id,
                name: d.name,
                description: d.description,
            })
            .collect()
    }
}
