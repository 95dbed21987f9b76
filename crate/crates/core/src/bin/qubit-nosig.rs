use std::process::ExitCode;

use clap::Parser;
use qubit_nosig::cli::{exit_code, run, Cli, RunConfig, EXIT_RUNTIME};

fn main() -> ExitCode {
    let config = RunConfig::from_cli(Cli::parse());
    let report = match run(&config) {
        Ok(report) => report,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(exit_code(&err) as u8);
        }
    };
    match &config.out {
        Some(path) => {
            if let Err(err) = std::fs::write(path, report) {
                eprintln!("error: cannot write {}: {err}", path.display());
                return ExitCode::from(EXIT_RUNTIME as u8);
            }
        }
        None => print!("{report}"),
    }
    ExitCode::SUCCESS
}
