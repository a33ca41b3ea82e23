//! Command-line front end: relation finding, minimal polynomial
//! reconstruction and the incremental-versus-classic benchmark.

pub mod bench;
pub mod commands;

use std::io::Write;

use clap::Parser;

pub use commands::{Cli, Command};

/// Exit status for a found relation or polynomial.
pub const EXIT_FOUND: i32 = 0;
/// Exit status for any error.
pub const EXIT_ERROR: i32 = 1;
/// Exit status for a certified bound.
pub const EXIT_BOUND: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ipslq_core::Error),
    #[error("{0}")]
    Input(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{0}")]
    Mismatch(String),
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit status. Output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_FOUND };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match commands::execute(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}
