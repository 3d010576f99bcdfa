use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::{json, Value};

use screenforge_core::diag::{has_errors, Diagnostic};
use screenforge_core::validate::check_document;
use screenforge_core::workspace::Workspace;
use screenforge_core::{build_bundle, lint, parse_app, serialize_app, Application, Catalogue, Target};
use screenforge_gateway::Gateway;
use screenforge_registry::{DiscoverReport, Registry, RegistryError};

use crate::pipeline::{self, Snapshot};
use crate::studio::{self, Studio};
use crate::{Cli, Command, Exit, Format, Template};

struct Out {
    format: Format,
}

impl Out {
    fn line(&self, s: impl AsRef<str>) {
        let mut stdout = std::io::stdout().lock();
        let _ = writeln!(stdout, "{}", s.as_ref());
        let _ = stdout.flush();
    }

    /// One record: `text` for people, `machine` as a single JSON line.
    fn record(&self, text: impl AsRef<str>, machine: Value) {
        match self.format {
            Format::Text => self.line(text),
            Format::Machine => self.line(machine.to_string()),
        }
    }

    fn diagnostics(&self, diags: &[Diagnostic]) -> Exit {
        for d in diags {
            match self.format {
                Format::Text => self.line(d.to_string()),
                Format::Machine => self.line(d.to_machine_line()),
            }
        }
        if self.format == Format::Text {
            let errors = diags.iter().filter(|d| d.is_error()).count();
            self.line(format!("{errors} error(s), {} warning(s)", diags.len() - errors));
        }
        if has_errors(diags) {
            Exit::Diagnostics
        } else {
            Exit::Ok
        }
    }
}

fn fail(code: &str, message: impl std::fmt::Display, exit: Exit) -> Exit {
    let message = message.to_string();
    if message.starts_with(code) {
        eprintln!("screenforge: {message}");
    } else {
        eprintln!("screenforge: {code}: {message}");
    }
    exit
}

fn read(path: &Path) -> Result<String, Exit> {
    std::fs::read_to_string(path).map_err(|e| fail("MISSING_FILE", format!("{}: {e}", path.display()), Exit::Usage))
}

fn registry(ws: &Workspace) -> Result<Registry, Exit> {
    Registry::open(ws.registry_file()).map_err(|e| fail(e.code(), e, Exit::Environment))
}

fn registry_exit(e: &RegistryError) -> Exit {
    match e {
        RegistryError::InvalidEndpoint(_) | RegistryError::UnknownSystem(_) => Exit::Usage,
        _ => Exit::Environment,
    }
}

/// Reads and parses an app file; parse diagnostics are printed.
fn load_app(out: &Out, path: &Path) -> Result<Application, Exit> {
    parse_app(&read(path)?).map_err(|d| out.diagnostics(&d))
}

pub async fn run(cli: Cli) -> Exit {
    let out = Out { format: cli.format };
    let ws = Workspace::new(&cli.workspace);
    let result = match cli.command {
        Command::Validate { path } => validate(&out, &ws, &path).await,
        Command::Lint { path } => lint_cmd(&out, &path),
        Command::Discover { endpoint, name } => discover(&out, &ws, &endpoint, name).await,
        Command::BindCheck { path } => bind_check(&out, &ws, &path).await,
        Command::Preview { path, port } => preview(&out, &ws, &path, port).await,
        Command::Deploy { path, targets } => deploy(&out, &ws, &path, &targets).await,
        Command::Catalogue { archive } => catalogue(&out, &ws, archive),
        Command::Serve { port } => serve(&out, &ws, port).await,
        Command::New {
            name,
            template,
            out: file,
        } => new_app(&out, &name, template, file),
    };
    result.unwrap_or_else(|exit| exit)
}

async fn validate(out: &Out, ws: &Workspace, path: &Path) -> Result<Exit, Exit> {
    let text = read(path)?;
    let snapshot = Snapshot::of(&registry(ws)?).await;
    Ok(out.diagnostics(&check_document(&text, &snapshot.descriptors)))
}

fn lint_cmd(out: &Out, path: &Path) -> Result<Exit, Exit> {
    let app = load_app(out, path)?;
    Ok(out.diagnostics(&lint(&app)))
}

async fn discover(out: &Out, ws: &Workspace, endpoint: &str, name: Option<String>) -> Result<Exit, Exit> {
    let registry = registry(ws)?;
    let name = name.unwrap_or_else(|| endpoint.to_string());
    let system = registry
        .register_system(endpoint, &name)
        .await
        .map_err(|e| fail(e.code(), &e, registry_exit(&e)))?;
    let report = registry
        .discover(&system.system_id)
        .await
        .map_err(|e| fail(e.code(), &e, registry_exit(&e)))?;
    for row in registry.list_catalogue(Some(&system.system_id)).await {
        out.record(
            format!("{}  {}  {}", row.system_id, row.service_id, row.name),
            json!(row),
        );
    }
    let rejected: Vec<Diagnostic> = report
        .rejected
        .iter()
        .map(|r| {
            Diagnostic::warning(
                DiscoverReport::INVALID_DESCRIPTOR,
                format!("/systems/{}/{}", system.system_id, r.service_id),
                &r.reason,
            )
        })
        .collect();
    if !rejected.is_empty() {
        out.diagnostics(&rejected);
    }
    Ok(Exit::Ok)
}

async fn bind_check(out: &Out, ws: &Workspace, path: &Path) -> Result<Exit, Exit> {
    let app = load_app(out, path)?;
    let snapshot = Snapshot::of(&registry(ws)?).await;
    Ok(out.diagnostics(&pipeline::bind_check(&app, &snapshot)))
}

async fn deploy(out: &Out, ws: &Workspace, path: &Path, targets: &[Target]) -> Result<Exit, Exit> {
    let app = load_app(out, path)?;
    let snapshot = Snapshot::of(&registry(ws)?).await;
    match pipeline::deploy(ws, &app, targets, &snapshot) {
        Ok((bundles, _)) => {
            for b in bundles {
                out.record(
                    format!("{}  {}  {}", b.target, b.bundle_id, b.checksum),
                    json!({ "bundleId": b.bundle_id, "target": b.target, "checksum": b.checksum }),
                );
            }
            Ok(Exit::Ok)
        }
        Err(e) if e.is_environment() => Err(fail("WORKSPACE_IO", e, Exit::Environment)),
        Err(e) => {
            out.diagnostics(&e.diagnostics());
            Ok(Exit::Diagnostics)
        }
    }
}

fn catalogue(out: &Out, ws: &Workspace, archive: Option<String>) -> Result<Exit, Exit> {
    let mut catalogue = Catalogue::open(ws.catalogue_file()).map_err(|e| fail(e.code(), &e, Exit::Environment))?;
    if let Some(id) = archive {
        catalogue.archive(&id).map_err(|e| match e.code() {
            "UNKNOWN_BUNDLE" => fail(e.code(), &e, Exit::Diagnostics),
            _ => fail(e.code(), &e, Exit::Environment),
        })?;
    }
    for e in catalogue.list() {
        out.record(
            format!(
                "{} v{}  {}  {}  {}",
                e.app_name,
                e.app_version,
                e.target,
                serde_json::to_value(e.status).unwrap().as_str().unwrap_or_default(),
                e.bundle_id
            ),
            json!(e),
        );
    }
    Ok(Exit::Ok)
}

async fn listen(out: &Out, port: u16, router: axum::Router) -> Result<Exit, Exit> {
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port))
        .await
        .map_err(|e| fail("BIND_FAILED", e, Exit::Environment))?;
    let addr = listener
        .local_addr()
        .map_err(|e| fail("BIND_FAILED", e, Exit::Environment))?;
    out.record(format!("http://{addr}"), json!({ "url": format!("http://{addr}") }));
    axum::serve(listener, router)
        .await
        .map_err(|e| fail("SERVE_FAILED", e, Exit::Environment))?;
    Ok(Exit::Ok)
}

fn app_server(studio: Arc<Studio>, gateway: Arc<Gateway>) -> axum::Router {
    screenforge_gateway::http::router(gateway).merge(studio::router(studio))
}

async fn preview(out: &Out, ws: &Workspace, path: &Path, port: u16) -> Result<Exit, Exit> {
    let app = load_app(out, path)?;
    let registry = Arc::new(registry(ws)?);
    let snapshot = Snapshot::of(&registry).await;
    let diags = screenforge_core::validate(&app, &snapshot.descriptors);
    if has_errors(&diags) {
        return Ok(out.diagnostics(&diags));
    }
    let adapters = pipeline::compile_adapters(&app, &snapshot).map_err(|d| out.diagnostics(&d))?;
    let bundle = build_bundle(&app, Target::Ios, &adapters)
        .map_err(|e| out.diagnostics(&[Diagnostic::error(e.code(), "/", e.to_string())]))?;
    let gateway = Arc::new(Gateway::new());
    let bundle_id = bundle.bundle_id.clone();
    gateway
        .host(bundle, &adapters)
        .map_err(|e| fail(e.code(), e, Exit::Environment))?;
    let studio = Arc::new(Studio::new(registry, ws.clone(), gateway.clone()));
    studio.insert_app(app).await;
    studio.set_preview(bundle_id);
    listen(out, port, app_server(studio, gateway)).await
}

async fn serve(out: &Out, ws: &Workspace, port: u16) -> Result<Exit, Exit> {
    let registry = Arc::new(registry(ws)?);
    let gateway = Arc::new(Gateway::new());
    gateway
        .load_workspace(ws)
        .map_err(|e| fail(e.code(), e, Exit::Environment))?;
    let studio = Arc::new(Studio::new(registry, ws.clone(), gateway.clone()));
    listen(out, port, app_server(studio, gateway)).await
}

fn new_app(out: &Out, name: &str, template: Template, file: Option<PathBuf>) -> Result<Exit, Exit> {
    let app = match template {
        Template::Blank => Application::blank(name),
    };
    let path = file.unwrap_or_else(|| PathBuf::from(format!("{name}.app.json")));
    if path.exists() {
        return Err(fail("FILE_EXISTS", path.display(), Exit::Usage));
    }
    let diags = screenforge_core::structure::check_structure(&app);
    if has_errors(&diags) {
        return Ok(out.diagnostics(&diags));
    }
    std::fs::write(&path, serialize_app(&app)).map_err(|e| fail("WRITE_FAILED", e, Exit::Environment))?;
    out.record(path.display().to_string(), json!({ "path": path }));
    Ok(Exit::Ok)
}
