use std::path::PathBuf;

use thiserror::Error;

use crate::measures::MeasureId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("row {row}: {message}")]
    InvalidRow { row: usize, message: String },

    #[error("input contains no data rows")]
    EmptyInput,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{measure} is undefined: {reason}")]
    Undefined { measure: MeasureId, reason: String },

    #[error("separation detected in calibration model: {0}")]
    Separation(String),

    #[error("singular calibration model: {0}")]
    Singular(String),

    #[error("calibration model did not converge after {iterations} iterations (log-likelihood trace {trace:?})")]
    NonConvergence { iterations: usize, trace: Vec<f64> },

    #[error("bootstrap refused: {dropped} of {replicates} replicates undefined for {measure}")]
    BootstrapRefused {
        measure: String,
        dropped: usize,
        replicates: usize,
    },

    #[error("samples differ: {0}")]
    MismatchedSamples(String),
}

impl Error {
    pub(crate) fn undefined(measure: MeasureId, reason: impl Into<String>) -> Self {
        Error::Undefined {
            measure,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad input or configuration rather than by a
    /// failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Csv(_)
                | Error::Json(_)
                | Error::Schema(_)
                | Error::InvalidRow { .. }
                | Error::EmptyInput
                | Error::InvalidArgument(_)
                | Error::MismatchedSamples(_)
        ) || matches!(self, Error::Io { .. })
    }
}
