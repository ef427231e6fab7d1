//! Command-line front end for `shadowvc`.
//!
//! Exit codes: 0 success, 2 invalid arguments, 3 I/O, format or manifest
//! error, 4 internal invariant violation, 5 a statistical gate failed.

mod args;
mod commands;

use std::ffi::OsString;
use std::fmt;

use clap::Parser;

pub use args::{AnalyzeArgs, AttackArgs, Cli, CombineArgs, Command, HeldArg, SplitArgs};
pub use commands::{analyze, attack_demo, combine, split, split_with_context, SplitOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Usage = 2,
    Io = 3,
    Internal = 4,
    GateFailed = 5,
}

#[derive(Debug)]
pub struct CliError {
    pub code: ExitCode,
    pub message: String,
}

impl CliError {
    pub fn new(code: ExitCode, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(ExitCode::Usage, message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(ExitCode::Internal, message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<shadowvc::Error> for CliError {
    fn from(e: shadowvc::Error) -> Self {
        use shadowvc::Error as E;
        let code = match &e {
            E::InvalidSeed(_) | E::InvalidShareCount(_) | E::TooFewShares(_) => ExitCode::Usage,
            E::InsufficientSamples(_) => ExitCode::Usage,
            E::Io { .. }
            | E::UnsupportedFormat { .. }
            | E::LossyFormat { .. }
            | E::UnsupportedCombination { .. }
            | E::Corrupt { .. }
            | E::MalformedManifest { .. }
            | E::ManifestVersion { .. }
            | E::InvalidManifest(_)
            | E::InvalidImage(_)
            | E::UnsupportedDepth(_)
            | E::GeometryMismatch { .. }
            | E::LengthMismatch { .. } => ExitCode::Io,
            E::DepthMismatch { .. }
            | E::ValueOutOfRange { .. }
            | E::ContextWiped
            | E::AddressOutOfBounds { .. } => ExitCode::Internal,
        };
        CliError::new(code, e.to_string())
    }
}

/// Parses `argv`, runs the subcommand and returns the process exit code.
/// Diagnostics go to stderr, reports to stdout.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::Usage as i32
            } else {
                ExitCode::Success as i32
            };
        }
    };
    let result = match &cli.command {
        Command::Split(a) => split(a).map(|_| ExitCode::Success),
        Command::Combine(a) => combine(a).map(|_| ExitCode::Success),
        Command::Analyze(a) => analyze(a),
        Command::AttackDemo(a) => attack_demo(a).map(|_| ExitCode::Success),
    };
    match result {
        Ok(code) => code as i32,
        Err(e) => {
            eprintln!("error: {e}");
            e.code as i32
        }
    }
}

pub(crate) fn warn_deterministic() {
    eprintln!(
        "warning: deterministic mode: every random draw is reproducible from the seed; \
         use only for tests and demonstrations"
    );
}
