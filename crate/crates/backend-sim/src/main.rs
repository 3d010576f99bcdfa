use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use screenforge_backend_sim::{BackendSim, Dataset};
use screenforge_core::fixtures::TECHSUPPORT_SERVICES;

/// Simulated enterprise backend with the TechSupport services.
#[derive(Parser)]
#[command(name = "backend-sim", version)]
struct Args {
    /// Address to bind; port 0 picks a free port.
    #[arg(long, default_value = "127.0.0.1:8081")]
    listen: String,
    /// Alternative seed dataset.
    #[arg(long)]
    seed: Option<PathBuf>,
}

#[tokio::main]
async fn main() -> ExitCode {
    let args = Args::parse();
    let sim = match &args.seed {
        None => BackendSim::techsupport(),
        Some(path) => {
            let data: Dataset = match std::fs::read_to_string(path)
                .map_err(|e| e.to_string())
                .and_then(|t| serde_json::from_str(&t).map_err(|e| e.to_string()))
            {
                Ok(d) => d,
                Err(e) => {
                    eprintln!("backend-sim: cannot load seed {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            };
            BackendSim::new(serde_json::from_str(TECHSUPPORT_SERVICES).unwrap(), data)
        }
    };
    let listener = match tokio::net::TcpListener::bind(&args.listen).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("backend-sim: cannot bind {}: {e}", args.listen);
            return ExitCode::from(3);
        }
    };
    println!("http://{}", listener.local_addr().unwrap());
    let _ = sim.serve(listener).await;
    ExitCode::SUCCESS
}
