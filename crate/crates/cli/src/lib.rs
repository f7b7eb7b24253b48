//! Command-line front end for `stratkit-core`: argument handling, the
//! bundled corpus of presentations, and text/JSON rendering of reports.

mod commands;
mod config;
pub mod corpus;
mod error;

pub use commands::{run, Report, Status};
pub use config::{Cli, Command, OutputFormat, RunConfig};
pub use error::CliError;

use clap::Parser;

/// Parses `args`, runs the command and writes the report. Returns the
/// process exit code: 0 on success or PASS, 1 on a certified FAIL, 2 on
/// any error.
pub fn main_with<I, T>(args: I, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return 2;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    let config = RunConfig::from(cli);
    match run(&config) {
        Ok(report) => {
            for w in &report.warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            let _ = out.write_all(report.render(&config).as_bytes());
            report.status.exit_code()
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}
