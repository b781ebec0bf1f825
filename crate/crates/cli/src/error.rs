use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] blaschke::Error),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        use blaschke::Error as E;
        match self {
            CliError::Usage(_) | CliError::Parse(_) => 2,
            CliError::Io(_) => 2,
            CliError::Core(e) => match e {
                E::Domain(_)
                | E::InvalidParameter(_)
                | E::Schedule(_)
                | E::Grid
                | E::CaseMismatch(_)
                | E::TargetCoincides => 2,
                E::SandwichViolation(_) | E::Multiplicity { .. } | E::CriticalMismatch { .. } => 4,
                _ => 5,
            },
        }
    }
}
