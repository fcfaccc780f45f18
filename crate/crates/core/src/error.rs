use thiserror::Error;

/// Errors produced by estimators, special functions and the experiment harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient data: need at least {needed} values, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    /// Every observation sits on the scale bound, so the log-exceedance sum is zero.
    #[error("infinite tail estimate: all values equal the scale bound {scale}")]
    InfiniteEstimate { scale: f64 },

    /// A parametric spec with tail exponent at or below 1 has no finite mean, hence no Gini.
    #[error("undefined mean: tail exponent {alpha} must exceed 1")]
    UndefinedMean { alpha: f64 },

    /// The tail exponent is at or below 1 + epsilon: the implied mean, and the Gini, do not exist.
    #[error(
        "infinite mean: debiased tail exponent {alpha_debiased} is not above 1 + epsilon = {cutoff}"
    )]
    InfiniteMean { alpha_debiased: f64, cutoff: f64 },

    /// Quadrature did not reach tolerance inside its subdivision budget.
    #[error(
        "quadrature did not converge: estimate {estimate} with error {error_estimate} on [{lower}, {upper}]"
    )]
    QuadratureNonConvergence {
        estimate: f64,
        error_estimate: f64,
        lower: f64,
        upper: f64,
    },

    /// A series or continued fraction ran out of terms before reaching tolerance.
    #[error(
        "series did not converge after {terms} terms: partial sum {partial}, last relative term {last_relative_term:e}"
    )]
    SeriesNonConvergence {
        partial: f64,
        terms: usize,
        last_relative_term: f64,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
