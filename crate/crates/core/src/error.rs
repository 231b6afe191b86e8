use thiserror::Error;

use crate::magnitude::Magnitude;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// `step(x) <= x` at the named iterate, so the orbit of thresholds stalls.
    #[error("below fixed threshold at index {index}: step({value}) does not exceed {value}")]
    BelowThreshold { index: usize, value: Magnitude },

    #[error("threshold not found on grid; largest violation at r = {at}")]
    ThresholdNotFound { at: Magnitude },

    #[error("inner model only reaches the outer threshold t_min = {outer_t_min} from t = {required_t_min}")]
    IncompatibleThresholds {
        outer_t_min: f64,
        required_t_min: f64,
    },

    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),

    #[error("hypothesis unmet: {0}")]
    HypothesisUnmet(String),

    #[error("internal consistency violated: {0}")]
    Consistency(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
