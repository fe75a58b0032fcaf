use thiserror::Error;

/// Errors raised by the fitting, evaluation, and harness layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch { context: &'static str, expected: usize, actual: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// The residual of the next Krylov vector vanished relative to the candidate.
    #[error("Arnoldi breakdown at step {step}: tail norm {tail_norm:e} vs candidate norm {candidate_norm:e}")]
    Breakdown { step: usize, tail_norm: f64, candidate_norm: f64 },

    #[error("degree {n} is too large for {m} data rows (need n <= m - 1)")]
    DegreeTooLarge { n: usize, m: usize },

    #[error("pole {pole_index} coincides with fitting node {node_index}")]
    PoleEqualsNode { pole_index: usize, node_index: usize },

    #[error("pole {index} equals its shift")]
    PoleEqualsShift { index: usize },

    #[error("Hessenberg pencil degenerates at column {column}")]
    PencilDegenerate { column: usize },

    #[error("evaluation point {point_index} coincides with pole {pole_index}")]
    EvaluationAtPole { point_index: usize, pole_index: usize },

    #[error("rank deficient: pivot {pivot} has magnitude {magnitude:e} (threshold {threshold:e})")]
    RankDeficient { pivot: usize, magnitude: f64, threshold: f64 },

    #[error("duplicate node at indices {first} and {second}")]
    DuplicateNode { first: usize, second: usize },

    #[error("zero Jordan superdiagonal entry at node {node}, order {order}")]
    ZeroAlpha { node: usize, order: usize },

    #[error("Newton iteration for Legendre root {index} did not converge")]
    NewtonDivergence { index: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dataset error at line {line}: {message}")]
    Dataset { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
