use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid fractional order {num}/{den}: mu must lie in (0,1]")]
    InvalidOrder { num: i64, den: i64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: expected {expected} interior points, found {found}")]
    GridMismatch { expected: usize, found: usize },

    #[error("dense operator of size {n} exceeds the cap of {cap}")]
    SizeOverflow { n: usize, cap: usize },

    #[error("operators {left} and {right} are not a matched left/right pair")]
    MismatchedPair { left: String, right: String },

    #[error("{what} must be positive at every interior point (index {index} is {value})")]
    NonPositive {
        what: &'static str,
        index: usize,
        value: f64,
    },

    #[error("h^mu = {h}^{mu} is irrational; use the float backend")]
    IrrationalScale { h: String, mu: String },

    #[error("eigensolver did not converge within {sweeps} sweeps (off-diagonal {off_diagonal:e})")]
    NoConvergence { sweeps: usize, off_diagonal: f64 },

    #[error("grid function is identically zero (trivial solution)")]
    TrivialSolution,

    #[error("eigenpair index {index} out of range 1..={n}")]
    SelectionOutOfRange { index: usize, n: usize },

    #[error("comparison hypothesis k(t) < m(t) fails at t = {t}: k = {k}, m = {m}")]
    HypothesisUnmet { t: i64, k: f64, m: f64 },
}
