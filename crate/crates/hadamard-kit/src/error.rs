//! Crate-wide error type.

use num_complex::Complex64;
use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The extended multiplication on the sphere is undefined for (0, inf) and (inf, 0).
    #[error("undefined product: 0 * inf has no continuous extension")]
    UndefinedProduct,

    /// A box pair would multiply a neighbourhood of 0 against a neighbourhood of inf.
    #[error("indeterminate set product: a factor reaching 0 meets a factor reaching inf")]
    IndeterminateProduct,

    /// A winding-number probe sits on (or numerically on) the cycle support.
    #[error("probe {0} lies on the cycle support")]
    PointOnCycle(Complex64),

    /// The singular sets do not satisfy the strong convolvability conditions.
    #[error("sets {0:?} and {1:?} are not strongly convolvable")]
    NotStronglyConvolvable(String, String),

    /// The evaluation point lies in (or too close to) the product set.
    #[error("point {0} lies in the product singular set (distance {1:.3e})")]
    PointInProduct(Complex64, f64),

    /// The (0, inf) membership pattern has no cycle prescription in the table.
    #[error("no table cycle exists for this 0/inf membership pattern")]
    TableCaseImpossible,

    /// Cycle synthesis was asked for a clearance it cannot honour.
    #[error("no margin: {0}")]
    NoMargin(String),

    /// Cycle synthesis could not certify its output.
    #[error("cycle synthesis failed: {0}")]
    SynthesisFailed(String),

    /// Expression text could not be parsed.
    #[error("parse error at offset {offset}: found {found}, expected {}", expected.join(" | "))]
    ParseError {
        offset: usize,
        found: String,
        expected: Vec<&'static str>,
    },

    /// Expression is outside the supported fragment (e.g. log of a non-affine argument).
    #[error("rejected expression: {0}")]
    RejectedExpression(String),

    /// Evaluation hit a declared singular point.
    #[error("singular point at {0}")]
    SingularPoint(Complex64),

    /// Evaluation hit a principal branch cut.
    #[error("branch cut at {0}")]
    BranchCut(Complex64),

    /// Unknown builtin function name.
    #[error("unknown builtin function `{0}`")]
    UnknownBuiltin(String),

    /// A Cauchy coefficient circle meets the declared singular set.
    #[error("circle |z| = {0} meets the singular set")]
    CircleMeetsSingularSet(f64),

    /// Limit extraction at infinity did not stabilise.
    #[error("no limit at infinity: successive extrapolations differ by {0:.3e}")]
    NoLimit(f64),

    /// The point at infinity belongs to the closure of the singular set.
    #[error("infinity lies in the closure of the singular set")]
    InfinityInSingularSet,

    /// The integrand failed at a quadrature node.
    #[error("integrand failed at {at}: {source}")]
    IntegrandFailure {
        at: Complex64,
        #[source]
        source: Box<Error>,
    },

    /// Adaptive bisection hit its depth limit before reaching the tolerance.
    #[error("quadrature tolerance not met (residual estimate {0:.3e})")]
    ToleranceNotMet(f64),

    /// A function was used where the table requires vanishing at infinity.
    #[error("function `{0}` must vanish at infinity for this cycle table cell")]
    VanishingAtInfinityViolated(String),

    /// A grid point lies outside the admissible evaluation window.
    #[error("grid point {0} lies outside the evaluation window")]
    GridOutsideWindow(Complex64),

    /// The requested set cannot be written as a finite union of log-polar boxes.
    #[error("unrepresentable set: {0}")]
    UnrepresentableSet(String),

    /// Malformed run configuration.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// I/O failure while reading or writing run artifacts.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Exit-code class used by the CLI: 2 for domain/config errors, 3 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ToleranceNotMet(_)
            | Error::NoLimit(_)
            | Error::SynthesisFailed(_)
            | Error::IntegrandFailure { .. } => 3,
            _ => 2,
        }
    }
}
