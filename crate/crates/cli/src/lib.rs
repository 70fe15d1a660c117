//! Command-line front end for the `hbvm` crate.
//!
//! Exit codes: 0 ok, 1 i/o error, 2 usage, 3 solver failure, 4 evaluation failure.

pub mod args;
pub mod commands;
pub mod error;
pub mod problems;
pub mod report;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

pub use args::{Cli, Command};
pub use error::CliError;
pub use report::{DriftReport, RunManifest};

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Tableau(a) => commands::tableau(a, out),
        Command::Integrate(a) => commands::integrate_cmd(a, out),
        Command::Convergence(a) => commands::convergence(a, out),
        Command::Annulus(a) => commands::annulus(a, out),
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, A>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    return 0;
                }
                _ => 2,
            };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
