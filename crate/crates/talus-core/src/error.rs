use std::path::PathBuf;

use crate::scheme1d::PropertyViolation;

/// Errors surfaced by simulation runs and persistence.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("node index {index} out of range for grid with n = {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("coordinate {x} outside the unit domain")]
    CoordinateOutOfDomain { x: f64 },

    #[error("time step fell below dt_min = {dt_min} with persisting violations: {violations:?}")]
    StepFailure {
        dt_min: f64,
        violations: Vec<PropertyViolation>,
    },

    #[error("explicit PDE step produced non-finite values at t = {t} (dt = {dt})")]
    CflFailure { t: f64, dt: f64 },

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
