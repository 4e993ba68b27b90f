use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two located roots sit closer than the clustering radius but do not
    /// pass the multiplicity test. Tighten the tolerance and retry.
    #[error("ill-conditioned root cluster near x = {at}")]
    IllConditioned { at: f64 },

    #[error("only {found} of {expected} roots are real")]
    NonRealRoots { found: usize, expected: usize },

    #[error("f = {f} lies outside [{a}, {b}]")]
    OutOfRange { f: f64, a: f64, b: f64 },

    #[error("boundary pattern violation: {0}")]
    PatternViolation(String),

    #[error("derivative has {available} real roots, needed {needed}")]
    InsufficientCriticalRoots { needed: usize, available: usize },

    #[error("eigenvalues {i} and {j} coincide (gap {gap:e})")]
    RepeatedEigenvalue { i: usize, j: usize, gap: f64 },

    #[error("singular Vandermonde system (eigenvalue gap {gap:e})")]
    SingularSystem { gap: f64 },

    #[error("index {index} belongs to a doubled pair at the endpoint")]
    IndexInDoubledPair { index: usize },

    #[error("angle {angle} is within the pole tolerance of a multiple of pi")]
    PoleAngle { angle: f64 },

    #[error("no sign change of H on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
}
