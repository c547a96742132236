//! `poev2` — line segment detection from edge strength maps.
//!
//! Subcommands: `detect` (maps in, segments out), `eval` (score predictions
//! against ground truth), `synth` (generate verification scenes), `sweep`
//! (seed-threshold grid over both detector modes).
//!
//! Exit codes: 0 success, 1 usage error, 2 i/o or data error, 3 internal
//! invariant violation.

use clap::Parser;

mod commands;
mod config;

use commands::{detect, eval, sweep, synth};

#[derive(Parser)]
#[command(
    name = "poev2",
    version,
    about = "Line segment detection from edge strength maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Subcommand)]
enum Command {
    /// Detect line segments in one edge map or a directory of them.
    Detect(detect::DetectArgs),
    /// Score predicted segments against ground truth.
    Eval(eval::EvalArgs),
    /// Generate synthetic edge maps with exact ground truth.
    Synth(synth::SynthArgs),
    /// Run detect+eval over a seed-threshold grid for both modes.
    Sweep(sweep::SweepArgs),
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad flag or config value (exit 1).
    Usage(String),
    /// Unreadable/malformed files or missing data (exit 2).
    Io(String),
    /// Broken internal invariant (exit 3).
    Internal(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

impl From<poev2::Error> for CliError {
    fn from(e: poev2::Error) -> Self {
        match e {
            poev2::Error::Param(_) => CliError::Usage(e.to_string()),
            poev2::Error::Io { .. } | poev2::Error::Format(_) => CliError::Io(e.to_string()),
            poev2::Error::Dimension(_) | poev2::Error::Degenerate(_) => {
                CliError::Internal(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let result = match cli.command {
        Command::Detect(args) => detect::run(args),
        Command::Eval(args) => eval::run(args),
        Command::Synth(args) => synth::run(args),
        Command::Sweep(args) => sweep::run(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.code());
    }
}
