use std::path::PathBuf;
use std::process::ExitCode;

use thiserror::Error;

/// Exit statuses of the `regshannon` binary.
pub mod exit {
    pub const OK: u8 = 0;
    pub const VERIFY_FAILED: u8 = 1;
    pub const INFEASIBLE: u8 = 2;
    pub const OUT_OF_WINDOW: u8 = 3;
    pub const USAGE: u8 = 64;
    pub const DATA: u8 = 65;
    pub const IO: u8 = 74;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Data(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Library(#[from] regshannon::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> ExitCode {
        use regshannon::Error as E;
        let code = match self {
            Self::Usage(_) => exit::USAGE,
            Self::Data(_) => exit::DATA,
            Self::Io { .. } => exit::IO,
            Self::Library(e) => match e {
                E::InvalidParameter { .. } | E::WindowTooSmall { .. } | E::UnsupportedOrder(_) => exit::USAGE,
                E::WindowExceedsData { .. } => exit::OUT_OF_WINDOW,
                E::FdNonConvergence { .. } => exit::VERIFY_FAILED,
                _ => exit::DATA,
            },
        };
        ExitCode::from(code)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
