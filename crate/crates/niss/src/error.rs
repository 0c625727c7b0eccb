//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by solvers, distributions, and protocols.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// Mismatched alphabet sizes or vector lengths.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A pmf failed its simplex invariants (negative mass or bad total).
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// A random variable has zero variance where a correlation is required.
    #[error("degenerate marginal: {0}")]
    Degenerate(String),

    /// Gram-Schmidt hit a (numerically) linearly dependent seed function.
    #[error("degenerate basis: {0}")]
    DegenerateBasis(String),

    /// An expectation vector lies outside the achievable set.
    #[error("infeasible expectation vector: {0}")]
    InfeasibleExpectation(String),

    /// A requested target exceeds what the input correlation allows.
    #[error("infeasible target: {0}")]
    InfeasibleTarget(String),

    /// A randomized function violates its pointwise conditions.
    #[error("condition violation: {0}")]
    ConditionViolation(String),

    /// Constraint violated when building or evaluating an optimization.
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),

    /// Problem size exceeds a documented enumeration cap.
    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    /// The rho kernel (or another linear system) is singular.
    #[error("singular kernel: {0}")]
    SingularKernel(String),

    /// Linear program is unbounded (indicates a construction bug).
    #[error("unbounded linear program: {0}")]
    Unbounded(String),

    /// Linear program is infeasible.
    #[error("infeasible linear program: {0}")]
    Infeasible(String),

    /// Instance file parse error with position information.
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse {
        /// 1-based line number.
        line: usize,
        /// 1-based column number.
        col: usize,
        /// What went wrong.
        msg: String,
    },

    /// Hypothesis of a closed form does not hold for the given input.
    #[error("unsupported hypothesis: {0}")]
    UnsupportedHypothesis(String),

    /// I/O failure while writing results.
    #[error("io error: {0}")]
    Io(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
