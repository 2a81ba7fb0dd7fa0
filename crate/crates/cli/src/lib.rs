//! Command-line surface: strict configuration, cached result records, and
//! text/CSV/JSON-lines emitters.

pub mod cache;
pub mod commands;
pub mod config;
pub mod record;
pub mod render;

use std::fmt;

use clap::Parser;

use crystalphase_core::berry::BerryError;
use crystalphase_core::cohomology::CohomologyError;
use crystalphase_core::crystal::CrystalError;
use crystalphase_core::manybody::ManyBodyError;

pub use config::{Cli, Command, Format, RunConfig, SubcommandKind};
pub use record::{Payload, ResultRecord};

pub const EXIT_OK: i32 = 0;
/// A requested consistency check failed (e.g. sector spectra mismatch).
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_GAP: i32 = 3;
pub const EXIT_MESH: i32 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_VALIDATION,
            message: msg.into(),
        }
    }

    pub fn with_code(code: i32, msg: impl Into<String>) -> Self {
        Self {
            code,
            message: msg.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<ManyBodyError> for CliError {
    fn from(e: ManyBodyError) -> Self {
        let code = match e {
            ManyBodyError::GapBelowThreshold { .. } | ManyBodyError::GapAtNode { .. } => EXIT_GAP,
            _ => EXIT_VALIDATION,
        };
        Self::with_code(code, e.to_string())
    }
}

impl From<BerryError> for CliError {
    fn from(e: BerryError) -> Self {
        match e {
            BerryError::ManyBody(inner) => inner.into(),
            BerryError::Degenerate { .. } | BerryError::BandGap { .. } => Self::with_code(EXIT_GAP, e.to_string()),
            BerryError::MeshTooCoarse { .. } | BerryError::Inadmissible { .. } | BerryError::InconsistentSewing { .. } => {
                Self::with_code(EXIT_MESH, e.to_string())
            }
            _ => Self::validation(e.to_string()),
        }
    }
}

impl From<CohomologyError> for CliError {
    fn from(e: CohomologyError) -> Self {
        Self::validation(e.to_string())
    }
}

impl From<CrystalError> for CliError {
    fn from(e: CrystalError) -> Self {
        Self::validation(e.to_string())
    }
}

/// Captured result of one invocation.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub records: Vec<ResultRecord>,
}

/// Runs a parsed command line and captures its output.
pub fn run(cli: &Cli) -> Outcome {
    let mut out = Outcome::default();
    let cfg = match RunConfig::from_cli(&cli.command) {
        Ok(c) => c,
        Err(e) => {
            out.code = e.code;
            out.stderr = format!("error: {e}\n");
            return out;
        }
    };
    match commands::execute(&cfg, &mut out.stderr) {
        Ok((records, status)) => {
            out.stdout = render::render(&cfg, &records);
            out.records = records;
            if let Some(err) = status {
                out.stderr.push_str(&format!("error: {err}\n"));
                out.code = err.code;
            }
        }
        Err(e) => {
            out.code = e.code;
            out.stderr.push_str(&format!("error: {e}\n"));
        }
    }
    out
}

/// Parses `args` (including the program name) and runs. Argument errors use
/// the validation exit code.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let text = e.render().to_string();
            let mut out = Outcome {
                code,
                ..Outcome::default()
            };
            if e.use_stderr() {
                out.stderr = text;
            } else {
                out.stdout = text;
            }
            out
        }
    }
}
