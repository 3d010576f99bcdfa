//! Structured service descriptors as advertised by backend systems.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::kind::FieldKind;
use crate::path::is_identifier;

/// Invocation protocols the gateway knows how to speak.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Protocol {
    #[serde(rename = "http-json")]
    HttpJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ServiceDescriptor {
    pub system_id: String,
    pub service_id: String,
    pub name: String,
    pub description: String,
    pub protocol: Protocol,
    pub invocation_path: String,
    pub inputs: Vec<ParameterSpec>,
    pub outputs: Vec<ParameterSpec>,
}

impl ServiceDescriptor {
    pub fn input(&self, name: &str) -> Option<&ParameterSpec> {
        self.inputs.iter().find(|p| p.name == name)
    }

    pub fn output(&self, name: &str) -> Option<&ParameterSpec> {
        self.outputs.iter().find(|p| p.name == name)
    }
}

/// Parameter type: one scalar, or a list of flat records.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamKind {
    Scalar(FieldKind),
    List(Vec<ParameterSpec>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawParameter", into = "RawParameter")]
pub struct ParameterSpec {
    pub name: String,
    pub kind: ParamKind,
    pub required: bool,
}

impl ParameterSpec {
    pub fn scalar(name: impl Into<String>, kind: FieldKind, required: bool) -> Self {
        Self {
            name: name.into(),
            kind: ParamKind::Scalar(kind),
            required,
        }
    }

    pub fn list(name: impl Into<String>, fields: Vec<ParameterSpec>) -> Self {
        Self {
            name: name.into(),
            kind: ParamKind::List(fields),
            required: false,
        }
    }

    pub fn is_list(&self) -> bool {
        matches!(self.kind, ParamKind::List(_))
    }

    pub fn field(&self, name: &str) -> Option<&ParameterSpec> {
        match &self.kind {
            ParamKind::List(fields) => fields.iter().find(|f| f.name == name),
            ParamKind::Scalar(_) => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParameter {
    name: String,
    kind: String,
    #[serde(default)]
    required: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fields: Option<Vec<ParameterSpec>>,
}

impl TryFrom<RawParameter> for ParameterSpec {
    type Error = String;

    fn try_from(raw: RawParameter) -> Result<Self, Self::Error> {
        let kind = match (raw.kind.as_str(), raw.fields) {
            ("list", Some(fields)) => ParamKind::List(fields),
            ("list", None) => return Err(format!("list parameter `{}` has no fields", raw.name)),
            (_, Some(_)) => return Err(format!("scalar parameter `{}` declares fields", raw.name)),
            (other, None) => {
                let kind: FieldKind = other.parse().map_err(|e| format!("{e}"))?;
                if !kind.is_scalar() {
                    return Err(format!("parameter `{}` has non-scalar kind {kind}", raw.name));
                }
                ParamKind::Scalar(kind)
            }
        };
        Ok(Self {
            name: raw.name,
            kind,
            required: raw.required,
        })
    }
}

impl From<ParameterSpec> for RawParameter {
    fn from(p: ParameterSpec) -> Self {
        let (kind, fields) = match p.kind {
            ParamKind::Scalar(k) => (k.as_str().to_string(), None),
            ParamKind::List(fields) => ("list".to_string(), Some(fields)),
        };
        Self {
            name: p.name,
            kind,
            required: p.required,
            fields,
        }
    }
}

/// Registry id for a backend system: `sys-` plus the first 8 hex digits of
/// SHA-256 over the endpoint's lowercased host and its path without trailing
/// slashes. The port is left out so the id survives a backend moving ports.
pub fn system_id_for(endpoint: &url::Url) -> String {
    let host = endpoint.host_str().unwrap_or_default().to_ascii_lowercase();
    let path = endpoint.path().trim_end_matches('/');
    let digest = Sha256::digest(format!("{host}{path}").as_bytes());
    format!("sys-{}", &hex::encode(digest)[..8])
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("descriptor `{service_id}` rejected: {reason}")]
pub struct DescriptorError {
    /// Best-effort id of the offending descriptor.
    pub service_id: String,
    pub reason: String,
}

/// Accepts a raw descriptor document only if it satisfies the descriptor
/// schema and the semantic rules the schema cannot express.
pub fn parse_descriptor(doc: &Value) -> Result<ServiceDescriptor, DescriptorError> {
    let service_id = doc.get("serviceId").and_then(Value::as_str).unwrap_or("?").to_string();
    let fail = |reason: String| DescriptorError {
        service_id: service_id.clone(),
        reason,
    };
    let descriptor: ServiceDescriptor =
        serde_path_to_error::deserialize(doc.clone()).map_err(|e| fail(e.to_string()))?;
    check_descriptor(&descriptor).map_err(fail)?;
    Ok(descriptor)
}

fn check_descriptor(d: &ServiceDescriptor) -> Result<(), String> {
    for (what, id) in [("systemId", &d.system_id), ("serviceId", &d.service_id)] {
        if !is_identifier(id) {
            return Err(format!("{what} `{id}` is not an identifier"));
        }
    }
    if !d.invocation_path.starts_with('/') {
        return Err("invocationPath must start with `/`".into());
    }
    check_params("inputs", &d.inputs, true)?;
    check_params("outputs", &d.outputs, true)
}

fn check_params(side: &str, params: &[ParameterSpec], allow_list: bool) -> Result<(), String> {
    let mut seen = HashSet::new();
    for p in params {
        if !is_identifier(&p.name) {
            return Err(format!("{side}: `{}` is not an identifier", p.name));
        }
        if !seen.insert(p.name.as_str()) {
            return Err(format!("{side}: parameter `{}` declared twice", p.name));
        }
        if let ParamKind::List(fields) = &p.kind {
            if !allow_list {
                return Err(format!("{side}: list `{}` nested inside a list", p.name));
            }
            if fields.is_empty() {
                return Err(format!("{side}: list `{}` has no fields", p.name));
            }
            check_params(&format!("{side}.{}", p.name), fields, false)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn schedule() -> Value {
        json!({
            "systemId": "sys-1",
            "serviceId": "getSchedule",
            "name": "Get schedule",
            "description": "Today's visits",
            "protocol": "http-json",
            "invocationPath": "/invoke/getSchedule",
            "inputs": [],
            "outputs": [{"name": "contacts", "kind": "list", "fields": [
                {"name": "contactId", "kind": "text", "required": true},
                {"name": "date", "kind": "date"}
            ]}]
        })
    }

    #[test]
    fn accepts_well_formed_descriptor() {
        let d = parse_descriptor(&schedule()).unwrap();
        let contacts = d.output("contacts").unwrap();
        assert!(contacts.is_list());
        assert_eq!(contacts.field("date").unwrap().kind, ParamKind::Scalar(FieldKind::Date));
        let back = serde_json::to_value(&d).unwrap();
        assert_eq!(parse_descriptor(&back).unwrap(), d);
    }

    #[test]
    fn missing_outputs_is_rejected_with_service_id() {
        let mut doc = schedule();
        doc.as_object_mut().unwrap().remove("outputs");
        let err = parse_descriptor(&doc).unwrap_err();
        assert_eq!(err.service_id, "getSchedule");
    }

    #[test]
    fn nested_lists_and_duplicates_rejected() {
        let mut doc = schedule();
        doc["outputs"][0]["fields"][1] =
            json!({"name": "inner", "kind": "list", "fields": [{"name": "x", "kind": "text"}]});
        assert!(parse_descriptor(&doc).is_err());

        let mut doc = schedule();
        doc["inputs"] = json!([{"name": "a", "kind": "text"}, {"name": "a", "kind": "date"}]);
        assert!(parse_descriptor(&doc).is_err());
    }

    #[test]
    fn unsupported_protocol_rejected() {
        let mut doc = schedule();
        doc["protocol"] = json!("soap");
        assert!(parse_descriptor(&doc).is_err());
    }
}
