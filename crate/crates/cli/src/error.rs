use thiserror::Error;
use wulffgrid::{EnergyError, GeomError, MultigridError, QcError, WulffError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("cannot export {artifact} as {format}")]
    FormatMismatch { artifact: String, format: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Multigrid(#[from] MultigridError),
    #[error(transparent)]
    Qc(#[from] QcError),
    #[error(transparent)]
    Wulff(#[from] WulffError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

impl CliError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config { path: path.into(), message: message.into() }
    }
}
