use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the simulation pipeline.
///
/// The CLI maps [`Error::is_config`] variants to exit code 2 and
/// everything else to exit code 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infeasible pitch law: {0}")]
    Infeasible(String),

    #[error("BEM did not converge at annulus {annulus} after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence {
        annulus: usize,
        iterations: usize,
        residual: f64,
    },

    #[error("degenerate geometry: {0}")]
    Geometry(String),

    #[error("no refracted ray connects source and receiver: {0}")]
    NoSolution(String),

    #[error("invalid sampling: {0}")]
    Sampling(String),

    #[error("report mismatch: {0}")]
    Mismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by bad user input (files, flags, scenarios)
    /// rather than by the model itself.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::Parse { .. }
                | Error::Validation { .. }
                | Error::InvalidArgument(_)
                | Error::Infeasible(_)
                | Error::Mismatch(_)
        )
    }
}
