mod args;
mod commands;
mod config;
mod io;
mod output;
mod reference;

use std::process::ExitCode;

use fastescape_core::{Error, Verdict};

use crate::config::ParseFailure;

const USAGE: u8 = 3;

fn error_code(e: &Error) -> u8 {
    match e {
        Error::HypothesisUnmet(_) => 1,
        Error::Consistency(_) => 2,
        _ => USAGE,
    }
}

fn main() -> ExitCode {
    let cli = match config::parse(std::env::args_os().collect()) {
        Ok(cli) => cli,
        Err(ParseFailure::Clap(e)) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
        Err(ParseFailure::Config(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(USAGE);
        }
    };

    let outcome = match commands::run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(error_code(&e));
        }
    };
    if let Err(e) = output::write(&cli, &outcome) {
        eprintln!("error: {e}");
        return ExitCode::from(USAGE);
    }

    ExitCode::from(match outcome.overall() {
        Some(Verdict::Fails) => 1,
        Some(Verdict::Inconclusive) if !cli.global.allow_inconclusive => 2,
        _ => 0,
    })
}
