use std::process::ExitCode;

use clap::{Parser, Subcommand};
use helicoid_cli::commands::{self, MeshArgs, SolveArgs, Status, VerifyArgs};

#[derive(Parser)]
#[command(name = "helicoid", version, about = "Genus-one helicoid: solve, mesh, verify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the period problem and write a solution record.
    Solve(SolveArgs),
    /// Mesh a solved surface or a reference surface to OBJ or PLY.
    Mesh(MeshArgs),
    /// Check a mesh and write a report.
    Verify(VerifyArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Mesh(a) => commands::mesh(a),
        Command::Verify(a) => commands::verify(a),
    };
    match result {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(Status::Internal as u8)
        }
    }
}
