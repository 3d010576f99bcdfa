//! The `screenforge` command line: validate, discover, deploy and run apps.

pub mod commands;
pub mod pipeline;
pub mod studio;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use screenforge_core::Target;

/// Exit statuses. Stable across releases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Diagnostics = 1,
    Usage = 2,
    Environment = 3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Template {
    Blank,
}

#[derive(Debug, Parser)]
#[command(
    name = "screenforge",
    version,
    about = "Design, check and deploy screen-oriented apps"
)]
pub struct Cli {
    /// Registry and catalogue location.
    #[arg(long, global = true, env = "SCREENFORGE_WORKSPACE", default_value = ".screenforge")]
    pub workspace: PathBuf,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate an app against the discovered services.
    Validate { path: PathBuf },
    /// Style warnings for an app.
    Lint { path: PathBuf },
    /// Register a backend and fetch its service descriptors.
    Discover {
        endpoint: String,
        #[arg(long)]
        name: Option<String>,
    },
    /// Validate with every binding required to type-check.
    BindCheck { path: PathBuf },
    /// Serve an app in preview mode.
    Preview {
        path: PathBuf,
        #[arg(long, default_value_t = 0)]
        port: u16,
    },
    /// Build and publish one bundle per target.
    Deploy {
        path: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "ios,android")]
        targets: Vec<Target>,
    },
    /// List deployed apps, or archive one.
    Catalogue {
        #[arg(long)]
        archive: Option<String>,
    },
    /// Run the gateway over every published bundle of the workspace.
    Serve {
        #[arg(long, default_value_t = 0)]
        port: u16,
    },
    /// Write a new app document.
    New {
        name: String,
        #[arg(long, value_enum, default_value_t = Template::Blank)]
        template: Template,
        /// Defaults to `<name>.app.json`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}
