//! Brute-force ground truth on the full configuration space for small `n`.

pub mod compare;
pub mod full_kernel;
pub mod gibbs;
pub mod space;
pub mod spectrum;

pub use compare::{oracle_report, OracleReport};
pub use full_kernel::{full_kernel, FullKernel};
pub use gibbs::{gibbs, gibbs_folded, project, GibbsMeasure};
pub use space::{ConfigSpace, MAX_EIGEN_N, MAX_N};
