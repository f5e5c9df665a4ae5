//! Library side of the `rigidity` binary: argument definitions, report
//! records and subcommand drivers.

pub mod cli;
pub mod commands;
pub mod error;
pub mod report;

use clap::Parser;

use crate::cli::{Cli, Command};
use crate::commands::Globals;
use crate::error::{code, CliError};

/// Parses `args` and runs the selected subcommand, returning the exit code.
/// Help and version requests print and return 0.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                code::USAGE
            } else {
                code::OK
            };
        }
    };
    let globals = Globals {
        seed: cli.seed,
        timestamp: !cli.no_timestamp,
    };
    let result = match &cli.command {
        Command::Check(a) => commands::check(a, &globals),
        Command::Ddvv(a) => commands::ddvv_cmd(a, &globals),
        Command::Model(a) => commands::model(a),
        Command::Immersion(a) => commands::immersion_cmd(a),
        Command::Pinch(a) => commands::pinch(a),
    };
    result.unwrap_or_else(|e: CliError| {
        eprintln!("rigidity: {e}");
        e.code
    })
}
