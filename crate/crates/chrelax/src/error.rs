//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    /// A semi-implicit denominator lost positivity; dt is too large for the
    /// stiffness of the named mode.
    #[error(
        "positivity guard violated at t = {t:.6e}: mode {mode:?} has {quantity} = {value:.6e} <= 0 \
         (reduce dt or disable the guard)"
    )]
    GuardViolation {
        t: f64,
        mode: Vec<usize>,
        quantity: &'static str,
        value: f64,
    },

    /// Pointwise nonlinearity produced non-finite values.
    #[error("nonlinear term {context} produced non-finite values (max |input| = {max_abs:.6e})")]
    NonFinite { context: &'static str, max_abs: f64 },

    /// [`Error::NonFinite`] caught mid-run, stamped with the step time.
    #[error("solution blew up at t = {t:.6e}: nonlinear term {context} produced non-finite values (max |input| = {max_abs:.6e})")]
    StepOverflow {
        t: f64,
        context: &'static str,
        max_abs: f64,
    },

    #[error("missing file: {0}")]
    MissingFile(String),

    #[error("malformed artifact {path}: {detail}")]
    MalformedArtifact { path: String, detail: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Attach a step time to a nonlinearity overflow raised inside a stepper.
    pub(crate) fn at_time(self, t: f64) -> Error {
        match self {
            Error::NonFinite { context, max_abs } => Error::StepOverflow { t, context, max_abs },
            other => other,
        }
    }

    /// Wrap an I/O error with the path it concerns.
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Error {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
