use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("ordering parameter {0} outside [-1, 1]")]
    OrderingOutOfRange(f64),

    #[error("degenerate covariance matrix (det = {det:e})")]
    DegenerateCovariance { det: f64 },

    #[error("covariance minus s*hbar is not positive definite at s = {s} (smallest eigenvalue {min_eig:e}); the s-ordered distribution is not a regular function")]
    SingularOrdering { s: f64, min_eig: f64 },

    #[error("cannot reorder from s = {from} to r = {to}: only widening (r < s) is supported")]
    OrderingDirection { from: f64, to: f64 },

    #[error("quadrature did not converge: last two estimates {previous} and {last}")]
    QuadratureFailure { previous: f64, last: f64 },

    #[error("adaptive integration did not reach tolerance: estimate {estimate:e}, error {error:e}")]
    IntegrationFailure { estimate: f64, error: f64 },

    #[error("Fock cutoff {cutoff} too small: trace defect {defect:e} exceeds tolerance {tol:e}")]
    CutoffTooSmall { cutoff: usize, defect: f64, tol: f64 },

    #[error("required Fock cutoff exceeds hard limit {limit}")]
    InfeasibleCutoff { limit: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix element out of floating-point range at (m, n) = ({m}, {n})")]
    Range { m: usize, n: usize },

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("characteristic polynomial has repeated roots (separation {separation:e})")]
    DegenerateRoots { separation: f64 },

    #[error("time integration became unstable at t = {t} (|G| = {value:e}); reduce the step size")]
    Unstable { t: f64, value: f64 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("the two states are identical")]
    DegeneratePair,
}

pub type Result<T> = std::result::Result<T, Error>;
