use thiserror::Error;

/// Errors raised by moment-problem operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lives on the wrong domain (atom at the origin, atom off the circle, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// An index, degree or window is outside what the input can supply.
    #[error("range error: {0}")]
    Range(String),

    /// A structural invariant of the input is violated (e.g. Hermitian symmetry).
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// An operation precondition does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Adaptive quadrature did not reach its tolerance.
    #[error("quadrature did not converge after {subdivisions} subdivisions: estimate {estimate}, error {error}")]
    Convergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    /// The Hankel matrix has lower numerical rank than requested.
    #[error("Hankel matrix has numerical rank {rank}, fewer than the {requested} requested")]
    RankDeficient { rank: usize, requested: usize },

    /// A numerical routine failed.
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    /// Short machine-readable tag for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Range(_) => "range",
            Error::Invariant(_) => "invariant",
            Error::Precondition(_) => "precondition",
            Error::Convergence { .. } => "convergence",
            Error::RankDeficient { .. } => "rank-deficient",
            Error::Numeric(_) => "numeric",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
