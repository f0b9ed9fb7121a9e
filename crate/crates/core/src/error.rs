use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Physicality problems found during sweeps are usually reported as verdicts
/// on the result types instead; this enum is for hard failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{func}: argument out of domain: {msg}")]
    Domain { func: &'static str, msg: String },

    #[error("{func}: no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        func: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("{func}: numeric failure: {msg}")]
    Numeric { func: &'static str, msg: String },

    #[error("{func}: unphysical state: {msg}")]
    Physicality { func: &'static str, msg: String },
}

impl Error {
    pub(crate) fn domain(func: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain {
            func,
            msg: msg.into(),
        }
    }

    pub(crate) fn numeric(func: &'static str, msg: impl Into<String>) -> Self {
        Error::Numeric {
            func,
            msg: msg.into(),
        }
    }

    pub(crate) fn physicality(func: &'static str, msg: impl Into<String>) -> Self {
        Error::Physicality {
            func,
            msg: msg.into(),
        }
    }

    /// Short machine-readable tag, used by the CLI error records and the C API.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain",
            Error::NoConvergence { .. } => "no_convergence",
            Error::Numeric { .. } => "numeric",
            Error::Physicality { .. } => "physicality",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
