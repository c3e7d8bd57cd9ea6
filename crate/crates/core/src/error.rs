use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("norm order p must be at least 1, got {0}")]
    InvalidNorm(f64),

    #[error("matrix has rank {rank} but {n_cols} columns; full column rank required")]
    RankDeficient { rank: usize, n_cols: usize },

    #[error("matrix must be tall: {n_rows} rows < {n_cols} columns")]
    NotTall { n_rows: usize, n_cols: usize },

    /// The minimum of `‖Bx‖_p` over the hyperplane `aᵀx = 1` is zero, so the
    /// generalized sensitivity of `a` with respect to `B` is unbounded.
    #[error("row is not in the row space of the reference matrix; sensitivity is unbounded")]
    UnboundedSensitivity,

    #[error("sensitivity is zero; the reduction is undefined")]
    ZeroSensitivity,

    #[error("fixed-point iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("recursion depth {depth} exceeded the limit {limit}")]
    RecursionDepth { depth: usize, limit: usize },
}
