//! The app catalogue: an append-only log of publish/archive events, compacted
//! by rewriting it atomically once it grows past twice its live size.

use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bundle::{Bundle, Target};
use crate::workspace::write_atomic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Published,
    Archived,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CatalogueEntry {
    pub bundle_id: String,
    pub app_name: String,
    pub app_version: u64,
    pub target: Target,
    pub status: Status,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
enum Event {
    Publish { entry: CatalogueEntry },
    Archive { bundle_id: String },
}

#[derive(Debug, thiserror::Error)]
pub enum CatalogueError {
    #[error("CHECKSUM_MISMATCH: bundle `{bundle_id}` content does not match its checksum")]
    ChecksumMismatch { bundle_id: String },
    #[error("no catalogue entry for bundle `{0}`")]
    UnknownBundle(String),
    #[error("catalogue log line {line}: {source}")]
    Corrupt { line: usize, source: serde_json::Error },
    #[error("catalogue io: {0}")]
    Io(#[from] io::Error),
}

impl CatalogueError {
    pub fn code(&self) -> &'static str {
        match self {
            CatalogueError::ChecksumMismatch { .. } => "CHECKSUM_MISMATCH",
            CatalogueError::UnknownBundle(_) => "UNKNOWN_BUNDLE",
            CatalogueError::Corrupt { .. } | CatalogueError::Io(_) => "CATALOGUE_IO",
        }
    }
}

/// Catalogue state plus its backing log. Mutations take `&mut self`, so one
/// value is the single writer.
#[derive(Debug)]
pub struct Catalogue {
    path: Option<PathBuf>,
    entries: Vec<CatalogueEntry>,
    log_lines: usize,
}

impl Catalogue {
    /// A catalogue that lives only in memory (preview mode).
    pub fn in_memory() -> Self {
        Self {
            path: None,
            entries: Vec::new(),
            log_lines: 0,
        }
    }

    /// Replays the log at `path`; a missing file is an empty catalogue.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, CatalogueError> {
        let path = path.into();
        let mut cat = Self {
            path: Some(path.clone()),
            entries: Vec::new(),
            log_lines: 0,
        };
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(cat),
            Err(e) => return Err(e.into()),
        };
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let event: Event =
                serde_json::from_str(line).map_err(|source| CatalogueError::Corrupt { line: i + 1, source })?;
            cat.apply(event);
            cat.log_lines += 1;
        }
        Ok(cat)
    }

    fn apply(&mut self, event: Event) {
        match event {
            Event::Publish { entry } => {
                self.entries.retain(|e| {
                    e.bundle_id != entry.bundle_id
                        && !(e.status == Status::Published
                            && e.app_name == entry.app_name
                            && e.app_version == entry.app_version
                            && e.target == entry.target)
                });
                self.entries.push(entry);
            }
            Event::Archive { bundle_id } => {
                for e in self.entries.iter_mut().filter(|e| e.bundle_id == bundle_id) {
                    e.status = Status::Archived;
                }
            }
        }
    }

    fn record(&mut self, event: Event) -> Result<(), CatalogueError> {
        if let Some(path) = &self.path {
            if let Some(dir) = path.parent() {
                fs::create_dir_all(dir)?;
            }
            let mut line = serde_json::to_string(&event).expect("events serialize");
            line.push('\n');
            let mut file = OpenOptions::new().create(true).append(true).open(path)?;
            file.write_all(line.as_bytes())?;
            file.sync_all()?;
            self.log_lines += 1;
        }
        self.apply(event);
        if self.log_lines > 2 * self.entries.len() + 8 {
            self.compact()?;
        }
        Ok(())
    }

    /// Rewrites the log as one publish (and archive) line per live entry.
    pub fn compact(&mut self) -> Result<(), CatalogueError> {
        let Some(path) = self.path.clone() else {
            return Ok(());
        };
        let mut text = String::new();
        let mut lines = 0;
        for e in &self.entries {
            let mut events = vec![Event::Publish {
                entry: CatalogueEntry {
                    status: Status::Published,
                    ..e.clone()
                },
            }];
            if e.status == Status::Archived {
                events.push(Event::Archive {
                    bundle_id: e.bundle_id.clone(),
                });
            }
            for ev in events {
                text.push_str(&serde_json::to_string(&ev).expect("events serialize"));
                text.push('\n');
                lines += 1;
            }
        }
        write_atomic(&path, text.as_bytes())?;
        self.log_lines = lines;
        Ok(())
    }

    /// Publishes a verified bundle, replacing any published entry for the
    /// same app, version and target.
    pub fn publish(&mut self, bundle: &Bundle) -> Result<CatalogueEntry, CatalogueError> {
        if !bundle.verify() {
            return Err(CatalogueError::ChecksumMismatch {
                bundle_id: bundle.bundle_id.clone(),
            });
        }
        let entry = CatalogueEntry {
            bundle_id: bundle.bundle_id.clone(),
            app_name: bundle.app_name.clone(),
            app_version: bundle.app_version,
            target: bundle.target,
            status: Status::Published,
        };
        self.record(Event::Publish { entry: entry.clone() })?;
        Ok(entry)
    }

    pub fn archive(&mut self, bundle_id: &str) -> Result<(), CatalogueError> {
        if !self.entries.iter().any(|e| e.bundle_id == bundle_id) {
            return Err(CatalogueError::UnknownBundle(bundle_id.to_string()));
        }
        self.record(Event::Archive {
            bundle_id: bundle_id.to_string(),
        })
    }

    /// All entries ordered by app name, then target, then version.
    pub fn list(&self) -> Vec<CatalogueEntry> {
        let mut out = self.entries.clone();
        out.sort_by(|a, b| {
            (&a.app_name, a.target, a.app_version, &a.bundle_id).cmp(&(
                &b.app_name,
                b.target,
                b.app_version,
                &b.bundle_id,
            ))
        });
        out
    }

    pub fn get(&self, bundle_id: &str) -> Option<&CatalogueEntry> {
        self.entries.iter().find(|e| e.bundle_id == bundle_id)
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    #[cfg(test)]
    fn log_lines(&self) -> usize {
        self.log_lines
    }
}
