//! Cross-checks of the magnetization chain against the enumerated dynamics.

use serde::Serialize;

use crate::chain::{build_kernel, evolve, spectral_gap, stationary, tv_distance, ProbVector};
use crate::error::Result;
use crate::model::ModelParams;

use super::full_kernel::full_kernel;
use super::gibbs::gibbs_folded;
use super::space::MAX_EIGEN_N;
use super::spectrum::{dense_lambda2, dense_spectrum, power_lambda2, spectrum_contained};

/// Largest entrywise difference between the lumped full kernel and the
/// birth-and-death kernel.
pub fn lumped_kernel_error(n: usize, beta: f64, censored: bool) -> Result<f64> {
    let full = full_kernel(n, beta, censored)?;
    let lumped = full.lumped();
    let bd = build_kernel(&ModelParams::new(n, beta)?, censored).to_dense();
    let mut worst: f64 = 0.0;
    for (a, b) in lumped.iter().zip(&bd) {
        for (x, y) in a.iter().zip(b) {
            worst = worst.max((x - y).abs());
        }
    }
    Ok(worst)
}

/// `max |pi(x) - mu~(S = x)|` for the censored chain.
pub fn stationary_error(n: usize, beta: f64) -> Result<f64> {
    let pi = stationary(&build_kernel(&ModelParams::new(n, beta)?, true))?;
    let marginal = gibbs_folded(n, beta)?.magnetization_marginal();
    Ok(pi
        .mass()
        .iter()
        .zip(&marginal)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// `max_t |TV(full law from all-plus, mu~) - TV(chain law from the top, pi)|`
/// over `t = 0..=steps`.
pub fn tv_identity_error(n: usize, beta: f64, steps: u64) -> Result<f64> {
    let full = full_kernel(n, beta, true)?;
    let mu = gibbs_folded(n, beta)?.mass;
    let full_curve = full.tv_curve(full.space.all_plus(), &mu, steps);

    let kernel = build_kernel(&ModelParams::new(n, beta)?, true);
    let pi = stationary(&kernel)?;
    let mut law = ProbVector::point(*kernel.lattice(), kernel.lattice().top());
    let mut worst: f64 = 0.0;
    for (t, d_full) in full_curve.iter().enumerate() {
        if t > 0 {
            law = evolve(&law, &kernel, 1)?;
        }
        worst = worst.max((tv_distance(&law, &pi) - d_full).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lambda2Comparison {
    /// Dense eigensolve of the full censored kernel.
    pub full_dense: f64,
    /// Power iteration on the full censored kernel.
    pub full_power: f64,
    /// Sturm bisection on the censored magnetization chain.
    pub chain: f64,
    /// Every chain eigenvalue occurs in the full spectrum.
    pub contained: bool,
}

pub fn lambda2_comparison(n: usize, beta: f64) -> Result<Lambda2Comparison> {
    let full = full_kernel(n, beta, true)?;
    let mu = gibbs_folded(n, beta)?.mass;
    let full_dense = dense_lambda2(&full, &mu)?;
    let full_power = power_lambda2(&full, &mu, 1e-12, 5_000_000)?;
    let kernel = build_kernel(&ModelParams::new(n, beta)?, true);
    let chain = spectral_gap(&kernel)?.lambda2;
    let sub = crate::chain::spectral::spectrum_dense(&kernel)?;
    let contained = spectrum_contained(&sub, &dense_spectrum(&full, &mu)?, 1e-9);
    Ok(Lambda2Comparison {
        full_dense,
        full_power,
        chain,
        contained,
    })
}

/// Summary of every oracle check at one `(n, beta)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub n: usize,
    pub beta: f64,
    pub kernel_error: f64,
    pub ordinary_kernel_error: f64,
    pub stationary_error: f64,
    pub tv_identity_error: f64,
    pub lambda2: Option<Lambda2Comparison>,
}

pub fn oracle_report(n: usize, beta: f64, tv_steps: u64) -> Result<OracleReport> {
    Ok(OracleReport {
        n,
        beta,
        kernel_error: lumped_kernel_error(n, beta, true)?,
        ordinary_kernel_error: lumped_kernel_error(n, beta, false)?,
        stationary_error: stationary_error(n, beta)?,
        tv_identity_error: tv_identity_error(n, beta, tv_steps)?,
        lambda2: if n <= MAX_EIGEN_N {
            Some(lambda2_comparison(n, beta)?)
        } else {
            None
        },
    })
}
