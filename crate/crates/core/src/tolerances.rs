//! Numerical tolerances shared by the exact routines and their tests.

/// Row sums of birth-and-death kernels.
pub const KERNEL_ROW_SUM: f64 = 1e-14;
/// Row sums of brute-force full kernels.
pub const FULL_KERNEL_ROW_SUM: f64 = 1e-13;
/// Fixed-point residual max |(pi P)(x) - pi(x)|.
pub const STATIONARY_RESIDUAL: f64 = 1e-12;
/// Unit mass of a probability vector.
pub const PROB_MASS: f64 = 1e-12;
/// Absolute accuracy of Sturm-bisection eigenvalues.
pub const EIGENVALUE: f64 = 1e-12;
/// Detailed-balance residual above which a kernel is rejected.
pub const DETAILED_BALANCE: f64 = 1e-10;
/// Residual |tanh(beta z) - z| targeted by the root solver.
pub const ZETA_RESIDUAL: f64 = 1e-14;
/// Agreement between the two dense eigenvalue routes of the oracle.
pub const ORACLE_EIGEN_AGREEMENT: f64 = 1e-9;
/// Smallest magnitude allowed for an LDLT pivot in a Sturm count.
pub const STURM_PIVOT_GUARD: f64 = 1e-300;
