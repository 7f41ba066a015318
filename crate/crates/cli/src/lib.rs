//! Batch front end for the resonance simulator: scenario files, experiment
//! commands and plot-ready CSV output.

use std::fmt;

use alr_core::error::AlrError;

pub mod commands;
pub mod output;
pub mod scenario;

pub use scenario::Scenario;

#[derive(Debug)]
pub enum CliError {
    /// Malformed or invalid input files and arguments.
    Config(String),
    /// Solver failure or unwritable output.
    Solver(String),
    /// A verification suite failed or a range did not bracket.
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Verification(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Solver(m) => write!(f, "solver error: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<AlrError> for CliError {
    fn from(e: AlrError) -> Self {
        match e {
            AlrError::Bracket(_) | AlrError::Resolution { .. } => CliError::Verification(e.to_string()),
            AlrError::InconsistentInput(_) | AlrError::Geometry(_) | AlrError::Source(_) => CliError::Config(e.to_string()),
            other => CliError::Solver(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Solver(format!("i/o: {e}"))
    }
}

/// Caps the global rayon pool at `ALR_THREADS` when set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("ALR_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("ALR_THREADS: expected a positive integer, got {v:?}")))?;
    // a pool built earlier in the same process keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
