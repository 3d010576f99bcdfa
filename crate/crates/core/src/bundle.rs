//! Platform-tagged deployable bundles.
//!
//! A bundle carries the serialized model and the ids of the adapters it
//! needs. Everything that identifies a backend stays on the gateway.

use std::fmt;
use std::fs;
use std::io;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::adapter::AdapterSpec;
use crate::diag::{has_errors, Diagnostic};
use crate::dsl::{serialize_app, to_canonical_json};
use crate::model::{Application, BindingRole};
use crate::validate::validate;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MODEL_FILE: &str = "model.app.json";
pub const ADAPTERS_FILE: &str = "adapters.json";

/// Used when the caller does not stamp a build time.
pub const EPOCH: &str = "1970-01-01T00:00:00Z";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Android,
    Ios,
}

impl Target {
    pub fn as_str(self) -> &'static str {
        match self {
            Target::Android => "android",
            Target::Ios => "ios",
        }
    }

    /// Rendering tokens consumed by platform renderers.
    fn tokens(self) -> serde_json::Value {
        match self {
            Target::Ios => json!({"statusBarHeight": 20, "navigationStyle": "back-chevron"}),
            Target::Android => json!({"statusBarHeight": 24, "navigationStyle": "up-arrow"}),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ios" => Ok(Target::Ios),
            "android" => Ok(Target::Android),
            other => Err(format!("unknown target `{other}` (expected ios or android)")),
        }
    }
}

/// Which adapter serves which binding. Ids only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AdapterRef {
    pub form_id: String,
    pub role: BindingRole,
    pub adapter_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bundle {
    pub bundle_id: String,
    pub app_name: String,
    pub app_version: u64,
    pub target: Target,
    /// Canonical `.app.json` text.
    pub model: String,
    pub adapter_refs: Vec<AdapterRef>,
    /// Hex SHA-256 over the canonical archive of the bundle content.
    pub checksum: String,
    /// Informational; not covered by the checksum.
    pub created_at: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("VALIDATION_FAILED: application has {} error(s)", .0.iter().filter(|d| d.is_error()).count())]
    ValidationFailed(Vec<Diagnostic>),
    #[error("MISSING_ADAPTER: no adapter for the {role} binding of form `{form}`")]
    MissingAdapter { form: String, role: BindingRole },
}

impl BuildError {
    pub fn code(&self) -> &'static str {
        match self {
            BuildError::ValidationFailed(_) => "VALIDATION_FAILED",
            BuildError::MissingAdapter { .. } => "MISSING_ADAPTER",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BundleIoError {
    #[error("bundle io: {0}")]
    Io(#[from] io::Error),
    #[error("bundle manifest: {0}")]
    Manifest(#[from] serde_json::Error),
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct Manifest {
    bundle_id: String,
    app_name: String,
    app_version: u64,
    target: Target,
    checksum: String,
    created_at: String,
    tokens: serde_json::Value,
}

/// Builds the bundle for `app` on `target`.
///
/// Pure: the same inputs always give the same bytes and checksum.
pub fn build_bundle(app: &Application, target: Target, adapters: &[AdapterSpec]) -> Result<Bundle, BuildError> {
    let diagnostics = validate(app, &[]);
    if has_errors(&diagnostics) {
        return Err(BuildError::ValidationFailed(diagnostics));
    }

    let mut adapter_refs = Vec::new();
    for (form, role, binding) in app.bindings() {
        let adapter = adapters.iter().find(|a| {
            a.form_id == form.id
                && a.role == role
                && a.system_id == binding.service_ref.system_id
                && a.service_id == binding.service_ref.service_id
                && a.request_mappings == binding.inputs
                && a.response_mappings == binding.outputs
        });
        let Some(adapter) = adapter else {
            return Err(BuildError::MissingAdapter {
                form: form.id.clone(),
                role,
            });
        };
        adapter_refs.push(AdapterRef {
            form_id: form.id.clone(),
            role,
            adapter_id: adapter.adapter_id.clone(),
        });
    }

    let mut bundle = Bundle {
        bundle_id: String::new(),
        app_name: app.name.clone(),
        app_version: app.version,
        target,
        model: serialize_app(app),
        adapter_refs,
        checksum: String::new(),
        created_at: EPOCH.to_string(),
    };
    bundle.checksum = bundle.compute_checksum();
    bundle.bundle_id = format!(
        "{}-{}-{}-{}",
        app.name.to_ascii_lowercase(),
        app.version,
        target,
        &bundle.checksum[..12]
    );
    Ok(bundle)
}

impl Bundle {
    fn adapters_bytes(&self) -> String {
        to_canonical_json(&serde_json::to_value(&self.adapter_refs).expect("refs serialize"))
    }

    fn target_bytes(&self) -> String {
        to_canonical_json(&json!({
            "appName": self.app_name,
            "appVersion": self.app_version,
            "target": self.target,
            "tokens": self.target.tokens(),
        }))
    }

    /// Checksum over the sorted archive `adapters.json`, `manifest.json`
    /// (without id, checksum and timestamp), `model.app.json`. Each entry is
    /// its name, a NUL, its length as a big-endian u64 and its bytes.
    pub fn compute_checksum(&self) -> String {
        let entries = [
            (ADAPTERS_FILE, self.adapters_bytes()),
            (MANIFEST_FILE, self.target_bytes()),
            (MODEL_FILE, self.model.clone()),
        ];
        let mut hasher = Sha256::new();
        for (name, bytes) in entries {
            hasher.update(name.as_bytes());
            hasher.update([0u8]);
            hasher.update((bytes.len() as u64).to_be_bytes());
            hasher.update(bytes.as_bytes());
        }
        hex::encode(hasher.finalize())
    }

    pub fn verify(&self) -> bool {
        self.compute_checksum() == self.checksum
    }

    pub fn with_created_at(mut self, created_at: impl Into<String>) -> Self {
        self.created_at = created_at.into();
        self
    }

    /// The files of the on-disk layout, in name order.
    pub fn files(&self) -> Vec<(&'static str, String)> {
        let manifest = Manifest {
            bundle_id: self.bundle_id.clone(),
            app_name: self.app_name.clone(),
            app_version: self.app_version,
            target: self.target,
            checksum: self.checksum.clone(),
            created_at: self.created_at.clone(),
            tokens: self.target.tokens(),
        };
        vec![
            (ADAPTERS_FILE, self.adapters_bytes()),
            (
                MANIFEST_FILE,
                to_canonical_json(&serde_json::to_value(manifest).expect("manifest serializes")),
            ),
            (MODEL_FILE, self.model.clone()),
        ]
    }

    /// Writes `dir/<file>` for every bundle file.
    pub fn write_to(&self, dir: &Path) -> Result<(), BundleIoError> {
        fs::create_dir_all(dir)?;
        for (name, bytes) in self.files() {
            crate::workspace::write_atomic(&dir.join(name), bytes.as_bytes())?;
        }
        Ok(())
    }

    /// Loads a bundle directory as-is; call [`Bundle::verify`] to detect tampering.
    pub fn read_from(dir: &Path) -> Result<Bundle, BundleIoError> {
        let manifest: Manifest = serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST_FILE))?)?;
        let adapter_refs = serde_json::from_str(&fs::read_to_string(dir.join(ADAPTERS_FILE))?)?;
        let model = fs::read_to_string(dir.join(MODEL_FILE))?;
        Ok(Bundle {
            bundle_id: manifest.bundle_id,
            app_name: manifest.app_name,
            app_version: manifest.app_version,
            target: manifest.target,
            model,
            adapter_refs,
            checksum: manifest.checksum,
            created_at: manifest.created_at,
        })
    }

    pub fn adapter_for(&self, form_id: &str, role: BindingRole) -> Option<&str> {
        self.adapter_refs
            .iter()
            .find(|r| r.form_id == form_id && r.role == role)
            .map(|r| r.adapter_id.as_str())
    }
}
