use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library reports.
///
/// Errors are `Clone` so that cached results (the mean of a distribution)
/// can hand out the same failure to every caller.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("mixture weights must be nonnegative and sum to 1 (sum = {sum})")]
    WeightSum { sum: f64 },

    #[error("scale factor must be positive, got {0}")]
    NonPositiveFactor(f64),

    #[error("shift by {offset} would move the support below zero (lower bound {lower})")]
    NegativeSupport { offset: f64, lower: f64 },

    #[error("transform inverse mismatch at y = {y}: phi(phi_inv(y)) = {roundtrip}")]
    InverseMismatch { y: f64, roundtrip: f64 },

    #[error("truncation point {at} is outside the open support ({lower}, {upper})")]
    TruncationOutOfSupport { at: f64, lower: f64, upper: f64 },

    #[error("operation requires a density, but {0} has none")]
    MissingDensity(String),

    #[error("quadrature failed to converge on [{a}, {b}] (error estimate {error:e})")]
    QuadratureFailure { a: f64, b: f64, error: f64 },

    #[error("tail integral from {from} does not converge")]
    DivergentIntegral { from: f64 },

    #[error("could not bracket the inverse of the survival function at level {level}")]
    BracketFailure { level: f64 },

    #[error("price {p} is beyond the numerical support (survival {survival:e})")]
    BeyondSupport { p: f64, survival: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("need at least {need} grid points, got {got}")]
    TooFewPoints { need: usize, got: usize },

    #[error("finite-difference step {h} is too small at p = {p}: cancellation")]
    StepTooSmall { p: f64, h: f64 },

    #[error("invalid distribution spec: {0}")]
    Spec(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// True for failures caused by bad input rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::WeightSum { .. }
                | Error::NonPositiveFactor(_)
                | Error::NegativeSupport { .. }
                | Error::InverseMismatch { .. }
                | Error::TruncationOutOfSupport { .. }
                | Error::Spec(_)
                | Error::Config(_)
        )
    }
}
