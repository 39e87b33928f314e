use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("oracle returned a non-finite value at the query point")]
    NonFiniteOracle,

    #[error("model subproblem: dual gap {gap:e} above tolerance {tol:e} after {iters} iterations")]
    DualNotConverged { gap: f64, tol: f64, iters: usize },

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("rejection sampler exceeded {cap} trials; stepsize or tolerance misconfigured")]
    TrialCapExceeded { cap: u64 },

    #[error("positive log acceptance ratio {0:e}: proposal does not minorize the target")]
    PositiveLogAcceptance(f64),

    #[error("proximal solve did not reach the target gap within {iters} iterations (last gap {last_gap:e})")]
    ProxNotConverged { iters: usize, last_gap: f64 },

    #[error("quadrature: {0}")]
    Quadrature(String),

    #[error("brute-force minimizer landed on the grid boundary; widen the half-width")]
    GridBoundary,

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
