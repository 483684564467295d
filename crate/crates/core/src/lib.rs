//! Exact and Monte Carlo analysis of censored and ordinary Glauber dynamics
//! for the Curie-Weiss Ising model.

pub mod chain;
pub mod error;
pub mod experiments;
pub mod model;
pub mod oracle;
pub mod sim;
pub mod tolerances;

pub use error::{Error, Result};
pub use model::{cutoff_schedule, p_minus, p_plus, solve_zeta, CutoffSchedule, ModelParams};
