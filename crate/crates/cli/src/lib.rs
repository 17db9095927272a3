// SPDX-License-Identifier: Apache-2.0

//! Command-line front end for J-Play.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 data error,
//! 4 numerical divergence. Failures print one `PREFIX: reason` line on stderr.

pub mod args;
pub mod commands;
pub mod error;
pub mod files;
pub mod pgm;
pub mod settings;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use error::{CliError, CliResult, Failure};

use args::{Cli, Command};

pub fn execute(cmd: &Command, out: &mut String) -> CliResult<()> {
    match cmd {
        Command::Train(a) => commands::train(a, false, out),
        Command::Pretrain(a) => commands::train(a, true, out),
        Command::Eval(a) => commands::eval(a, out),
        Command::Gridsearch(a) => commands::gridsearch(a, out),
        Command::ExportFeatures(a) => commands::export_features(a, out),
        Command::Synth(a) => commands::synth(a, out),
    }
}

/// Parses `argv` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let first = e.to_string().lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            let _ = writeln!(stderr, "{}", CliError::config(first));
            let _ = write!(stderr, "{}", e.render());
            return Failure::Config.code();
        }
    };
    let mut out = String::new();
    let result = execute(&cli.command, &mut out);
    let _ = stdout.write_all(out.as_bytes());
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            e.code()
        }
    }
}
