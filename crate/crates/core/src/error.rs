use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the formula it feeds.
    #[error("{name} must be {requirement}, got {value}")]
    Domain {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A field or projection that must carry weight is identically zero.
    #[error("zero mode: {0}")]
    ZeroMode(String),

    #[error("invalid mixture: {0}")]
    Mixture(String),

    #[error("no ring detected: {0}")]
    NoRing(String),

    #[error("invalid image: {0}")]
    Image(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("sweep row {row} (xi_p = {xi_p}, w0 = {w0} m): {source}")]
    SweepRow {
        row: usize,
        xi_p: f64,
        w0: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(name: &'static str, requirement: &'static str, value: f64) -> Self {
        Error::Domain {
            name,
            requirement,
            value,
        }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by bad input data rather than bad arguments.
    pub fn is_data_error(&self) -> bool {
        match self {
            Error::ZeroMode(_)
            | Error::NoRing(_)
            | Error::Image(_)
            | Error::Parse { .. }
            | Error::Io(_) => true,
            Error::SweepRow { source, .. } => source.is_data_error(),
            _ => false,
        }
    }
}

/// Checks `value > 0` and finite.
pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::domain(name, "positive and finite", value))
    }
}
