use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("tanh({beta}x) = x has no positive root for beta <= 1")]
    NoPositiveRoot { beta: f64 },

    #[error("delta^2 n = {value} <= 1: the cutoff formulas need delta^2 n > 1")]
    OutsideRegime { value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("chain is reducible: zero transition probability on edge {from} -> {to}")]
    Reducible { from: i64, to: i64 },

    #[error("kernel is not reversible: detailed-balance residual {residual:e} at state {state}")]
    NotReversible { state: i64, residual: f64 },

    #[error("non-finite value in log-space accumulation at state {state}")]
    NumericOverflow { state: i64 },

    #[error("lattice mismatch: distribution has {dist} states, kernel has {kernel}")]
    LatticeMismatch { dist: usize, kernel: usize },

    #[error("epsilon {epsilon} not reached within horizon {horizon}")]
    NeedLargerHorizon { epsilon: f64, horizon: u64 },

    #[error("configurations are not ordered (hi >= lo fails at site {site})")]
    OrderViolation { site: usize },

    #[error("chains did not coalesce within {max_steps} steps")]
    NotCoalesced { max_steps: u64 },

    #[error("threshold not hit within {max_steps} steps")]
    NotHit { max_steps: u64 },

    #[error("iteration did not converge in {iterations} steps (residual {residual:e})")]
    NoConvergence { iterations: u64, residual: f64 },

    #[error("n = {n} exceeds the brute-force limit {limit}")]
    TooLarge { n: usize, limit: usize },
}
