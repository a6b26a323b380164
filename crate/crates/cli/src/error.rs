use std::path::PathBuf;

use thiserror::Error;

/// Failures surfaced by the command-line tool.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error in {path} at line {line}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        column: usize,
        message: String,
    },
    #[error("unknown column '{0}'")]
    UnknownColumn(String),
    #[error("{0}")]
    Input(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Estimation(#[from] despar::Error),
}

impl CliError {
    /// 0 success, 1 numerical failure, 2 input error.
    pub fn exit_code(&self) -> i32 {
        use despar::Error as E;
        match self {
            CliError::Estimation(e) => match e {
                E::InvalidData(_)
                | E::InvalidConfig(_)
                | E::BadDimension(_)
                | E::IndexOutOfRange { .. }
                | E::DimensionMismatch { .. }
                | E::InvalidRestriction(_)
                | E::EmptyH
                | E::EmptyS
                | E::LagTooLarge { .. } => 2,
                _ => 1,
            },
            _ => 2,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
