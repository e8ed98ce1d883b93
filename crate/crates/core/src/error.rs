use thiserror::Error;

use crate::construction::ConstructionError;
use crate::homotopy::HomotopyError;
use crate::hyperspace::HyperspaceError;
use crate::invariants::InvariantError;
use crate::metric::MetricError;

/// Top-level error; each variant wraps the error of the stage that failed.
#[derive(Debug, Error)]
pub enum Error {
    #[error("metric: {0}")]
    Metric(#[from] MetricError),
    #[error("construction: {0}")]
    Construction(#[from] ConstructionError),
    #[error("hyperspace: {0}")]
    Hyperspace(#[from] HyperspaceError),
    #[error("homotopy: {0}")]
    Homotopy(#[from] HomotopyError),
    #[error("invariants: {0}")]
    Invariants(#[from] InvariantError),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {path}: {reason}")]
    Io {
        path: String,
        reason: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            reason: source,
        }
    }

    /// Name of the pipeline stage the error originated in.
    pub fn stage(&self) -> &'static str {
        match self {
            Error::Metric(_) => "metric",
            Error::Construction(_) => "construction",
            Error::Hyperspace(_) => "hyperspace",
            Error::Homotopy(_) => "homotopy",
            Error::Invariants(_) => "invariants",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
