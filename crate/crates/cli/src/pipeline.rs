//! Deploy pipeline: registry snapshot + app -> adapters -> bundles -> catalogue.

use screenforge_core::adapter::AdapterError;
use screenforge_core::bundle::BuildError;
use screenforge_core::catalogue::CatalogueError;
use screenforge_core::diag::{codes, has_errors, Diagnostic, Severity};
use screenforge_core::model::loc;
use screenforge_core::workspace::Workspace;
use screenforge_core::{
    build_bundle, generate_adapter, validate, AdapterSpec, Application, Bundle, Catalogue, ServiceDescriptor, Target,
};
use screenforge_registry::{BackendSystem, Registry};

/// What the registry knows, captured once per command.
#[derive(Debug, Clone, Default)]
pub struct Snapshot {
    pub systems: Vec<BackendSystem>,
    pub descriptors: Vec<ServiceDescriptor>,
}

impl Snapshot {
    pub async fn of(registry: &Registry) -> Self {
        Self {
            systems: registry.systems().await,
            descriptors: registry.descriptors().await,
        }
    }

    fn endpoint(&self, system_id: &str) -> Option<&str> {
        self.systems
            .iter()
            .find(|s| s.system_id == system_id)
            .map(|s| s.discovery_endpoint.as_str())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DeployError {
    #[error("application has errors")]
    Invalid(Vec<Diagnostic>),
    #[error("{0}")]
    Build(#[from] BuildError),
    #[error("{0}")]
    Catalogue(#[from] CatalogueError),
    #[error("workspace: {0}")]
    Io(#[from] std::io::Error),
}

impl DeployError {
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        match self {
            DeployError::Invalid(d) => d.clone(),
            DeployError::Build(BuildError::ValidationFailed(d)) => d.clone(),
            DeployError::Build(e) => vec![Diagnostic::error(e.code(), "/", e.to_string())],
            DeployError::Catalogue(e) => vec![Diagnostic::error(e.code(), "/", e.to_string())],
            DeployError::Io(e) => vec![Diagnostic::error("WORKSPACE_IO", "/", e.to_string())],
        }
    }

    /// Environment failures, as opposed to problems with the app.
    pub fn is_environment(&self) -> bool {
        matches!(self, DeployError::Io(_)) || matches!(self, DeployError::Catalogue(e) if e.code() == "CATALOGUE_IO")
    }
}

/// Validation where every binding must be type-checked: a binding to a system
/// that was never discovered is an error here, not a warning.
pub fn bind_check(app: &Application, snapshot: &Snapshot) -> Vec<Diagnostic> {
    validate(app, &snapshot.descriptors)
        .into_iter()
        .map(|mut d| {
            if d.code == codes::UNCHECKED_SERVICE {
                d.severity = Severity::Error;
            }
            d
        })
        .collect()
}

/// One adapter per binding, aimed at the endpoint the registry recorded.
pub fn compile_adapters(app: &Application, snapshot: &Snapshot) -> Result<Vec<AdapterSpec>, Vec<Diagnostic>> {
    let mut adapters = Vec::new();
    let mut diags = Vec::new();
    for (form, role, binding) in app.bindings() {
        let sref = &binding.service_ref;
        let found = snapshot
            .descriptors
            .iter()
            .find(|d| d.system_id == sref.system_id && d.service_id == sref.service_id)
            .zip(snapshot.endpoint(&sref.system_id));
        let Some((descriptor, endpoint)) = found else {
            diags.push(Diagnostic::error(
                "UNCHECKED_BINDING",
                loc::binding(&form.id, role),
                format!("{sref} is not in the registry"),
            ));
            continue;
        };
        match generate_adapter(app, &form.id, role, descriptor, endpoint) {
            Ok(a) => adapters.push(a),
            Err(AdapterError::UncheckedBinding { diagnostics, .. }) => diags.extend(diagnostics),
            Err(e) => diags.push(Diagnostic::error(e.code(), loc::binding(&form.id, role), e.to_string())),
        }
    }
    if diags.is_empty() {
        Ok(adapters)
    } else {
        Err(diags)
    }
}

/// Builds one bundle per target, writes bundles and adapters into the
/// workspace and publishes them. Nothing is written unless every target builds.
pub fn deploy(
    workspace: &Workspace,
    app: &Application,
    targets: &[Target],
    snapshot: &Snapshot,
) -> Result<(Vec<Bundle>, Vec<AdapterSpec>), DeployError> {
    let diags = bind_check(app, snapshot);
    if has_errors(&diags) {
        return Err(DeployError::Invalid(diags));
    }
    let adapters = compile_adapters(app, snapshot).map_err(DeployError::Invalid)?;
    let now = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    let bundles = targets
        .iter()
        .map(|t| build_bundle(app, *t, &adapters).map(|b| b.with_created_at(now.clone())))
        .collect::<Result<Vec<_>, _>>()?;

    for a in &adapters {
        workspace.save_adapter(a)?;
    }
    let mut catalogue = Catalogue::open(workspace.catalogue_file())?;
    for b in &bundles {
        b.write_to(&workspace.bundle_dir(&b.bundle_id))
            .map_err(|e| std::io::Error::other(e.to_string()))?;
        catalogue.publish(b)?;
    }
    Ok((bundles, adapters))
}
