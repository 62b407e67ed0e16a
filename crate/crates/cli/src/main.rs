use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;

use commands::{bench, check, laws, riccati};

/// Pseudospherical-surface toolkit: structure checks, conservation-law
/// hierarchies, Riccati equivalence suites and PDE drift benches.
///
/// Exit status: 0 pass, 1 check failure, 2 input error, 3 numeric failure.
#[derive(Parser)]
#[command(name = "psurf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the structure identities of a model file.
    Check(check::CheckArgs),
    /// Generate and verify the conservation-law hierarchy.
    Laws(laws::LawsArgs),
    /// Run the Riccati equivalence and closedness suite on a closed-form solution.
    Riccati(riccati::RiccatiArgs),
    /// Evolve the equation and track the conserved integrals.
    Bench(bench::BenchArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(a) => check::run(&a),
        Command::Laws(a) => laws::run(&a),
        Command::Riccati(a) => riccati::run(&a),
        Command::Bench(a) => bench::run(&a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
