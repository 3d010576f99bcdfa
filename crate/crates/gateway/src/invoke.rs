//! One HTTP call to a backend on behalf of an adapter.

use std::time::Duration;

use serde_json::{Map, Value as Json};

use screenforge_core::AdapterSpec;

/// Per-call bound. There is no automatic retry.
pub const ADAPTER_TIMEOUT: Duration = Duration::from_secs(5);

/// Header stamped on every mediated call.
pub const VIA_HEADER: &str = "x-screenforge-via";
pub const VIA_VALUE: &str = "screenforge-gateway";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvokeError {
    #[error("UNREACHABLE: {0}")]
    Unreachable(String),
    #[error("BACKEND_ERROR({0})")]
    BackendError(u16),
    #[error("MALFORMED_RESPONSE: {0}")]
    MalformedResponse(String),
}

impl InvokeError {
    pub fn code(&self) -> &'static str {
        match self {
            InvokeError::Unreachable(_) => "UNREACHABLE",
            InvokeError::BackendError(_) => "BACKEND_ERROR",
            InvokeError::MalformedResponse(_) => "MALFORMED_RESPONSE",
        }
    }
}

pub fn client(timeout: Duration) -> reqwest::Client {
    reqwest::Client::builder()
        .timeout(timeout)
        .build()
        .expect("http client")
}

/// Posts `request` (the bare input record) to the adapter's backend and
/// returns the bare output record.
pub async fn invoke_adapter(
    client: &reqwest::Client,
    adapter: &AdapterSpec,
    request: &Map<String, Json>,
) -> Result<Map<String, Json>, InvokeError> {
    let url = adapter.url();
    let resp = client
        .post(&url)
        .header(VIA_HEADER, VIA_VALUE)
        .json(request)
        .send()
        .await
        .map_err(|e| InvokeError::Unreachable(format!("{url}: {e}")))?;
    let status = resp.status();
    if !status.is_success() {
        return Err(InvokeError::BackendError(status.as_u16()));
    }
    let text = resp
        .text()
        .await
        .map_err(|e| InvokeError::Unreachable(format!("{url}: {e}")))?;
    match serde_json::from_str::<Json>(&text) {
        Ok(Json::Object(map)) => Ok(map),
        Ok(other) => Err(InvokeError::MalformedResponse(format!(
            "expected a record, got {other}"
        ))),
        Err(e) => Err(InvokeError::MalformedResponse(e.to_string())),
    }
}
