use clap::Parser;

use screenforge_cli::{commands, Cli};

#[tokio::main]
async fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    let exit = commands::run(cli).await;
    std::process::ExitCode::from(exit as u8)
}
