//! On-disk layout of a working directory.
//!
//! ```text
//! <root>/registry.workspace.json   discovered systems and descriptors
//! <root>/catalogue.log             published bundles
//! <root>/bundles/<bundleId>/       bundle files
//! <root>/adapters/<adapterId>.json gateway-only adapter recipes
//! ```

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::adapter::AdapterSpec;

pub const DEFAULT_DIR: &str = ".screenforge";
pub const ENV_VAR: &str = "SCREENFORGE_WORKSPACE";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Workspace {
    root: PathBuf,
}

impl Workspace {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn registry_file(&self) -> PathBuf {
        self.root.join("registry.workspace.json")
    }

    pub fn catalogue_file(&self) -> PathBuf {
        self.root.join("catalogue.log")
    }

    pub fn bundle_dir(&self, bundle_id: &str) -> PathBuf {
        self.root.join("bundles").join(bundle_id)
    }

    pub fn adapter_file(&self, adapter_id: &str) -> PathBuf {
        self.root.join("adapters").join(format!("{adapter_id}.json"))
    }

    pub fn save_adapter(&self, adapter: &AdapterSpec) -> io::Result<()> {
        let text = serde_json::to_string_pretty(adapter).map_err(io::Error::other)?;
        write_atomic(&self.adapter_file(&adapter.adapter_id), text.as_bytes())
    }

    pub fn load_adapter(&self, adapter_id: &str) -> io::Result<AdapterSpec> {
        let text = fs::read_to_string(self.adapter_file(adapter_id))?;
        serde_json::from_str(&text).map_err(io::Error::other)
    }
}

/// Replaces `path` with `bytes` via a temp file in the same directory and a
/// rename, so readers see either the old or the new content.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
