//! Command-line front end for the `bqap` library.
//!
//! Every subcommand prints text by default and a single JSON object with
//! `--json`. Exit codes: 0 success, 1 a verified property failed, 2 invalid
//! arguments or files, 3 enumeration limit exceeded.

mod args;
mod commands;

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::Parser;

pub use args::Cli;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] bqap::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    File { path: PathBuf, source: bqap::Error },
    #[error("{0}")]
    Usage(String),
    #[error("{0} propert{s} failed", s = if *.0 == 1 { "y" } else { "ies" })]
    PropertyFailed(usize),
    #[error("cannot write output: {0}")]
    Output(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::PropertyFailed(_) => 1,
            CliError::Core(bqap::Error::SpaceTooLarge { .. }) => 3,
            _ => 2,
        }
    }
}

/// Parses `args` (program name first) and runs the subcommand, returning the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    let mut buf = Vec::new();
    let mut result = match cli.threads {
        Some(threads) => match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(|| commands::dispatch(&cli, &mut buf)),
            Err(e) => Err(CliError::Usage(format!("cannot start {threads} threads: {e}"))),
        },
        None => commands::dispatch(&cli, &mut buf),
    };
    if let Err(e) = out.write_all(&buf).and_then(|()| out.flush()) {
        result = result.and(Err(CliError::Output(e)));
    }
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
