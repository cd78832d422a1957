use thiserror::Error;

/// Failure modes shared by every numerical pipeline in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{function}: pole at {at}")]
    Pole { function: &'static str, at: String },

    #[error("{function}: argument outside domain ({detail})")]
    Domain { function: &'static str, detail: String },

    #[error("{what} did not converge: {detail}")]
    NonConvergence { what: &'static str, detail: String },

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("bracket failure: {0}")]
    BracketFailure(String),

    #[error("branch ambiguity: {0}")]
    BranchAmbiguity(String),

    #[error("point outside the stationary-point neighbourhood: {0}")]
    OutOfNeighborhood(String),

    #[error("quadrature truncation failure: {0}")]
    TruncationFailure(String),

    #[error("precision insufficient: {required} digits required, {available} available")]
    PrecisionInsufficient { required: u32, available: u32 },

    #[error("zeta zero table does not cover ordinate {0}")]
    Coverage(String),

    #[error("target outside attainable range: {0}")]
    RangeExhausted(String),

    #[error("multiplicity ambiguity: {0}")]
    MultiplicityAmbiguity(String),

    #[error("derivative underflow: {0}")]
    DerivativeUnderflow(String),

    #[error("continuation stalled: {0}")]
    ContinuationStall(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag for the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Pole { .. } => "pole",
            Error::Domain { .. } => "domain",
            Error::NonConvergence { .. } => "non_convergence",
            Error::Consistency(_) => "consistency",
            Error::BracketFailure(_) => "bracket_failure",
            Error::BranchAmbiguity(_) => "branch_ambiguity",
            Error::OutOfNeighborhood(_) => "out_of_neighborhood",
            Error::TruncationFailure(_) => "truncation_failure",
            Error::PrecisionInsufficient { .. } => "precision_insufficient",
            Error::Coverage(_) => "coverage",
            Error::RangeExhausted(_) => "range_exhausted",
            Error::MultiplicityAmbiguity(_) => "multiplicity_ambiguity",
            Error::DerivativeUnderflow(_) => "derivative_underflow",
            Error::ContinuationStall(_) => "continuation_stall",
            Error::Unsupported(_) => "unsupported",
            Error::Invalid(_) => "invalid_input",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
