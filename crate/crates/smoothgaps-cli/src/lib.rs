//! Library side of the smoothgaps binary: argument surface, canonical run
//! configuration, report emission and the command implementations.

pub mod commands;
pub mod config;
pub mod output;
pub mod par;

use smoothgaps_core::Error as CoreError;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(std::io::Error),
    Core(CoreError),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
            CliError::Core(CoreError::Domain(_)) => "domain",
            CliError::Core(CoreError::OutOfRange(_)) => "out_of_range",
            CliError::Core(CoreError::Capacity(_)) => "capacity",
            CliError::Core(CoreError::NotSmooth { .. }) => "not_smooth",
            CliError::Core(CoreError::ConstructionFailed(_)) => "construction_failed",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(CoreError::Capacity(_)) => 2,
            CliError::Core(CoreError::ConstructionFailed(_)) => 3,
            _ => 1,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Io(e) => e.to_string(),
            CliError::Core(e) => e.to_string(),
        }
    }
}
