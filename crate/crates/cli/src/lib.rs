//! Command-line front end for `rotframe`.
//!
//! [`run`] parses arguments, executes one subcommand and writes its artifact.
//! Exit status is 0 when every requested check passes, 1 when a check fails
//! and 2 for usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;
use serde::Deserialize;

pub mod args;
pub mod commands;
pub mod output;

use args::{Cli, Format, GlobalArgs};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] rotframe::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use rotframe::Error as E;
        match self {
            CliError::Usage(_) | CliError::Json(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Core(
                E::Parse { .. }
                | E::InvalidArgument(_)
                | E::InvalidAxis { .. }
                | E::InvalidExpression(_)
                | E::SuperluminalBoost { .. },
            ) => EXIT_USAGE,
            CliError::Core(_) | CliError::Csv(_) => EXIT_CHECK_FAILED,
        }
    }
}

/// Settings after merging defaults, the config file and flags.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub c: f64,
    pub seed: u64,
    /// `None` means each command's own default.
    pub tol: Option<f64>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            c: 1.0,
            seed: 0,
            tol: None,
            format: Format::Json,
            out: None,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    c: Option<f64>,
    seed: Option<u64>,
    tol: Option<f64>,
    format: Option<Format>,
    out: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(global: &GlobalArgs) -> Result<Self, CliError> {
        let file = match &global.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
                serde_json::from_str::<ConfigFile>(&text)
                    .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))?
            }
            None => ConfigFile::default(),
        };
        let d = RunConfig::default();
        let cfg = RunConfig {
            c: global.c.or(file.c).unwrap_or(d.c),
            seed: global.seed.or(file.seed).unwrap_or(d.seed),
            tol: global.tol.or(file.tol),
            format: global.format.or(file.format).unwrap_or(d.format),
            out: global.out.clone().or(file.out),
        };
        if !(cfg.c > 0.0 && cfg.c.is_finite()) {
            return Err(CliError::Usage(format!("--c must be positive, got {}", cfg.c)));
        }
        if let Some(t) = cfg.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Usage(format!("--tol must be positive, got {t}")));
            }
        }
        Ok(cfg)
    }
}

/// What a command produced.
pub struct Outcome {
    pub bytes: Vec<u8>,
    pub passed: bool,
}

/// Runs the CLI; returns the process exit status.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match execute(&cli, stdout) {
        Ok(passed) => {
            if passed {
                EXIT_PASS
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<bool, CliError> {
    let cfg = RunConfig::resolve(&cli.global)?;
    let outcome = commands::dispatch(&cli.command, &cfg)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, &outcome.bytes)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?,
        None => stdout.write_all(&outcome.bytes)?,
    }
    Ok(outcome.passed)
}
