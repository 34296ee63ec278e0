use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the domain of a special function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("series did not converge within {terms} terms")]
    NonConvergence { terms: usize },

    #[error("deformation function is singular at n = {n}: {reason}")]
    DeformationSingular { n: usize, reason: String },

    #[error("invalid deformation spec: {0}")]
    InvalidDeformation(String),

    #[error("truncation cap {cap} reached with estimated tail mass {tail:e}")]
    TruncationOverflow { cap: usize, tail: f64 },

    #[error("deformation pair is incompatible at (n1, n2) = ({n1}, {n2})")]
    IncompatibleDeformation { n1: usize, n2: usize },

    #[error("superposition branches cancel (N^-2 = {norm_sq:e})")]
    DegenerateSuperposition { norm_sq: f64 },

    #[error("degenerate tomogram direction: mu^2 + nu^2 = {0:e}")]
    DegenerateDirection(f64),

    #[error("series tail not converged: remaining mass {tail:e} at index limit {limit}")]
    TailNotConverged { limit: usize, tail: f64 },

    #[error("state is not normalized: norm^2 = {0}")]
    NotNormalized(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
