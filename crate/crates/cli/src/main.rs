//! `qct`: run sessions, attack scenarios and parameter sweeps.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Protocol ran but the verdict was an abort or did not match.
pub const EXIT_MISMATCH: u8 = 1;
/// Bad flags, config or I/O.
pub const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("qct: {}", first_line(&e.to_string()));
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let result = match cli.command {
        Command::Run(a) => commands::run(a),
        Command::Attack(a) => commands::attack(a),
        Command::Sweep(a) => commands::sweep(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("qct: {}", first_line(&format!("{e:#}")));
            ExitCode::from(EXIT_USAGE)
        }
    }
}

/// Collapses a diagnostic to one line, dropping clap's usage footer.
fn first_line(msg: &str) -> String {
    msg.trim()
        .trim_start_matches("error: ")
        .lines()
        .map(str::trim)
        .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more information"))
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}
