mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::{Cli, Command};
use crate::error::{exit, CliResult};

fn run(cli: &Cli) -> CliResult<u8> {
    match &cli.command {
        Command::Params(a) => commands::params(a),
        Command::Bound(a) => commands::bound(a),
        Command::Stencil(a) => commands::stencil(a),
        Command::Approx(a) => commands::approx(a),
        Command::Check(a) => commands::check(a),
        Command::Verify(a) => commands::verify(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(exit::USAGE),
            };
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("regshannon: {e}");
            e.exit_code()
        }
    }
}
