mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;

/// Failures surfaced by the front end, mapped onto exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unparsable values, unreadable inputs.
    Config(String),
    /// An error raised by the library.
    Core(trirec::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Core(trirec::Error::WitnessNotFound { .. }) => 3,
            CliError::Core(trirec::Error::Parse(_)) => 1,
            CliError::Core(_) => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Config(msg) => format!("config: {msg}"),
            CliError::Core(e) => format!("{}: {e}", e.kind()),
        }
    }
}

impl From<trirec::Error> for CliError {
    fn from(e: trirec::Error) -> Self {
        CliError::Core(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help, --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{}", e.render());
            return ExitCode::from(1);
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("trirec: error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
