use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the interpolation pipeline, the oracles and the
/// convergence laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index out of range: {what} (m = {m}, n = {n}, len = {len})")]
    IndexOutOfRange {
        what: &'static str,
        m: usize,
        n: usize,
        len: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("node {node} at position {position} repeats a point that is not contiguous with its earlier occurrence")]
    NonContiguousNodes { node: Complex64, position: usize },

    #[error("missing sample data at {point}: need derivative order {needed}, have {available}")]
    MissingDerivative {
        point: Complex64,
        needed: usize,
        available: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("singular system: pivot {pivot:.3e} below threshold {threshold:.3e} at column {column}")]
    SingularSystem {
        column: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("evaluation at a pole of the interpolant: |V({z})| = {magnitude:.3e}")]
    EvalAtPole { z: Complex64, magnitude: f64 },

    #[error("point {0} lies in the interpolation set E")]
    PointInsideE(Complex64),

    #[error("poles are not ordered by nondecreasing level Phi")]
    UnsortedPoles,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("point {0} coincides with a node")]
    PointIsNode(Complex64),

    #[error("not enough data for a rate fit: {0}")]
    InsufficientData(String),

    #[error("study inconclusive: only {successful} successful p-values (need at least 4)")]
    StudyInconclusive { successful: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
