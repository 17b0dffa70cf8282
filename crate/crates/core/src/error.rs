use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("closed form requires the resonant regime: {0}")]
    RegimeViolation(String),

    #[error("no transparency peak found (contrast {contrast:e})")]
    NoPeak { contrast: f64 },

    #[error("no interior extremum: coarse grid is monotone on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("finite-difference step {step:e} does not perturb x = {x:e}")]
    StepUnderflow { x: f64, step: f64 },

    #[error("quadrature integrand reaches {value:e} at the outermost node")]
    QuadratureDivergence { value: f64 },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// True when the error comes from the numerics rather than from bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Degenerate(_)
                | Error::NoPeak { .. }
                | Error::NoBracket { .. }
                | Error::StepUnderflow { .. }
                | Error::QuadratureDivergence { .. }
        )
    }
}
