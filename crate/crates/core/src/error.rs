use thiserror::Error;

/// Errors produced by simulation, estimation and schedule construction.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its admissible range (non-positive rate, u outside (0,1), ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A query point or schedule time falls outside the window it refers to.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// The data cannot identify the requested parameter (e.g. a trace with no
    /// observed state transition leaves the off-rate likelihood monotone).
    #[error("unidentifiable: {0}")]
    Unidentifiable(String),

    /// The closed-form estimator has no valid solution for this input.
    #[error("estimator undefined for this trace: {0}")]
    EstimatorUndefined(String),

    /// The hypothesis of the closed-form Fisher bounds does not hold.
    #[error("bounds not applicable: {0}")]
    BoundsNotApplicable(String),

    /// An iterative sampler or search failed to converge.
    #[error("non-convergence: {0}")]
    NonConvergence(String),

    /// A config file or CSV input could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
