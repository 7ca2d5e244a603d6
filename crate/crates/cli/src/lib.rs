//! Experiment driver for secure-authentication-rate studies: a flat
//! key/value configuration format with command-line overrides, a sweep
//! engine producing one CSV row per (grid point, scheme), a byte-stable CSV
//! writer, a small SVG polyline plotter, and a self-check suite that crosses
//! the closed forms against the seeded Monte-Carlo oracle.

pub mod config;
pub mod csvout;
pub mod svg;
pub mod sweep;
pub mod validate;

/// Driver errors, split by the exit code they map to: configuration and IO
/// problems exit 1, numerical failures exit 2.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numeric(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}
