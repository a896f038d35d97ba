use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid value for `{key}`: {reason}")]
    InvalidConfig { key: String, reason: String },

    #[error("rank correlation targets ({rho1}, {rho2}, {rho3}) imply a latent correlation matrix that is not positive semi-definite (smallest eigenvalue {min_eigenvalue:.4})")]
    NotPositiveSemidefinite {
        rho1: f64,
        rho2: f64,
        rho3: f64,
        min_eigenvalue: f64,
    },

    #[error("in/out degree sums still differ by {last_tau} (threshold {threshold}) after {attempts} sampling attempts; the in- and out-degree marginals are probably mismatched")]
    ResamplingExhausted {
        attempts: usize,
        last_tau: u64,
        threshold: f64,
    },

    #[error("in/out degree sum difference {tau} is not below the balance threshold {threshold}")]
    BalancePrecondition { tau: u64, threshold: f64 },

    #[error("{path}:{line}: {reason}")]
    EdgeList {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
