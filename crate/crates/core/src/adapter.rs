//! Gateway-side mediation recipes compiled from checked bindings.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::binding::check_binding;
use crate::descriptor::ServiceDescriptor;
use crate::diag::{has_errors, Diagnostic};
use crate::dsl::to_canonical_json;
use crate::model::{Application, BindingRole, DataMapping};

/// Everything the gateway needs to call one backend operation for one form.
///
/// Holds the backend endpoint, so it stays on the gateway and never goes into
/// a bundle; bundles refer to adapters by `adapter_id` only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AdapterSpec {
    pub adapter_id: String,
    pub form_id: String,
    pub role: BindingRole,
    pub system_id: String,
    pub service_id: String,
    pub endpoint: String,
    pub invocation_path: String,
    /// Session record to request record.
    pub request_mappings: Vec<DataMapping>,
    /// Response record to session record.
    pub response_mappings: Vec<DataMapping>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AdapterError {
    #[error("UNCHECKED_BINDING: binding for form `{form}` ({role}) does not pass check_binding")]
    UncheckedBinding {
        form: String,
        role: BindingRole,
        diagnostics: Vec<Diagnostic>,
    },
    #[error("form `{form}` has no {role} binding")]
    NoBinding { form: String, role: BindingRole },
    #[error("descriptor {0} does not match the binding's service reference")]
    DescriptorMismatch(String),
}

impl AdapterError {
    pub fn code(&self) -> &'static str {
        match self {
            AdapterError::UncheckedBinding { .. } => "UNCHECKED_BINDING",
            AdapterError::NoBinding { .. } => "MISSING_ADAPTER",
            AdapterError::DescriptorMismatch(_) => "UNCHECKED_BINDING",
        }
    }
}

/// Compiles the `role` binding of `form_id` into an adapter aimed at
/// `endpoint`.
///
/// The binding is re-checked against `descriptor`; anything but a clean check
/// is refused. The adapter id is derived from the app, form, role and the
/// endpoint-free content of the recipe, so moving a backend to a new address
/// does not change any bundle.
pub fn generate_adapter(
    app: &Application,
    form_id: &str,
    role: BindingRole,
    descriptor: &ServiceDescriptor,
    endpoint: &str,
) -> Result<AdapterSpec, AdapterError> {
    let form = app.form(form_id).ok_or_else(|| AdapterError::NoBinding {
        form: form_id.to_string(),
        role,
    })?;
    let binding = form.binding(role).ok_or_else(|| AdapterError::NoBinding {
        form: form_id.to_string(),
        role,
    })?;
    if binding.service_ref.system_id != descriptor.system_id || binding.service_ref.service_id != descriptor.service_id
    {
        return Err(AdapterError::DescriptorMismatch(format!(
            "{}/{}",
            descriptor.system_id, descriptor.service_id
        )));
    }
    let diagnostics = check_binding(app, form, role, binding, descriptor);
    if has_errors(&diagnostics) {
        return Err(AdapterError::UncheckedBinding {
            form: form_id.to_string(),
            role,
            diagnostics,
        });
    }

    let mut spec = AdapterSpec {
        adapter_id: String::new(),
        form_id: form_id.to_string(),
        role,
        system_id: descriptor.system_id.clone(),
        service_id: descriptor.service_id.clone(),
        endpoint: endpoint.trim_end_matches('/').to_string(),
        invocation_path: descriptor.invocation_path.clone(),
        request_mappings: binding.inputs.clone(),
        response_mappings: binding.outputs.clone(),
    };
    spec.adapter_id = format!(
        "{}.{}.{}-{}",
        app.name.to_ascii_lowercase(),
        form_id,
        role,
        &recipe_digest(&spec)[..10]
    );
    Ok(spec)
}

fn recipe_digest(spec: &AdapterSpec) -> String {
    let recipe = serde_json::json!({
        "formId": spec.form_id,
        "role": spec.role,
        "systemId": spec.system_id,
        "serviceId": spec.service_id,
        "invocationPath": spec.invocation_path,
        "requestMappings": spec.request_mappings,
        "responseMappings": spec.response_mappings,
    });
    hex::encode(Sha256::digest(to_canonical_json(&recipe).as_bytes()))
}

impl AdapterSpec {
    /// Full URL the gateway posts to.
    pub fn url(&self) -> String {
        format!("{}{}", self.endpoint, self.invocation_path)
    }
}
