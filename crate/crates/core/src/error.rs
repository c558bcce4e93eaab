use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The per-rank dual scaling is unbounded when a zero weight meets a
    /// nonzero correlation; the cumulative scaling has no such restriction.
    #[error("per-rank dual scaling undefined: weight {rank} is zero but the correlation at that rank is {value:e}; use the cumulative scaling instead")]
    ZeroWeightScaling { rank: usize, value: f64 },

    #[error("problem too large for the brute-force oracle: n = {n} exceeds {limit}")]
    SizeGuard { n: usize, limit: usize },

    #[error("parse error in {path}: {msg}")]
    Parse { path: PathBuf, msg: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by a numerical guard rather than bad input.
    pub fn is_numerical_guard(&self) -> bool {
        matches!(self, Error::ZeroWeightScaling { .. } | Error::SizeGuard { .. })
    }
}

pub(crate) fn check_len(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { context, expected, got })
    }
}
