use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances;

use super::dist::{stationary, ProbVector};
use super::kernel::BirthDeathKernel;
use super::tridiag;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralMethod {
    TridiagonalBisection,
    DenseOracle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    /// `1 - lambda2`
    pub gap: f64,
    pub lambda2: f64,
    pub lambda_min: f64,
    pub method: SpectralMethod,
    /// Rayleigh quotient of the magnetization test function, an upper bound
    /// on `gap`.
    pub dirichlet_bound: f64,
}

/// Rejects kernels whose edges are used in one direction only, then checks
/// detailed balance against the recursion-built stationary law.
fn reversible_stationary(kernel: &BirthDeathKernel) -> Result<ProbVector> {
    let lattice = kernel.lattice();
    let (p, q) = (kernel.p(), kernel.q());
    for i in 0..kernel.len() - 1 {
        let (fwd, back) = (p[i] > 0.0, q[i + 1] > 0.0);
        if fwd != back {
            return Err(Error::NotReversible {
                state: lattice.j(i),
                residual: p[i].max(q[i + 1]),
            });
        }
    }
    let pi = stationary(kernel)?;
    let m = pi.mass();
    for i in 0..kernel.len() - 1 {
        let residual = (m[i] * p[i] - m[i + 1] * q[i + 1]).abs();
        if residual > tolerances::DETAILED_BALANCE {
            return Err(Error::NotReversible {
                state: lattice.j(i),
                residual,
            });
        }
    }
    Ok(pi)
}

/// `E_pi[(s - E[S_1 | S_0 = s]) (s - c)] / var_pi(s)`: the Dirichlet form of
/// the test function `s - c` over its variance. Centered at `zeta` in the
/// low-temperature phase and at the mean otherwise; the value does not depend
/// on the center because `pi` is stationary.
pub fn dirichlet_bound(kernel: &BirthDeathKernel, pi: &ProbVector) -> f64 {
    let lattice = kernel.lattice();
    let drift = kernel.drift();
    let center = crate::model::solve_zeta(kernel.beta(), tolerances::ZETA_RESIDUAL).unwrap_or_else(|_| pi.mean());
    let form: f64 = (0..kernel.len())
        .map(|i| pi.mass()[i] * (-drift[i]) * (lattice.s(i) - center))
        .sum();
    form / pi.variance()
}

/// Gap of a reversible birth-and-death kernel. The kernel is similar to the
/// symmetric tridiagonal matrix with diagonal `h` and off-diagonal
/// `sqrt(p_i q_{i+1})`, whose eigenvalues are bisected with Sturm counts.
pub fn spectral_gap(kernel: &BirthDeathKernel) -> Result<SpectralResult> {
    let pi = reversible_stationary(kernel)?;
    let len = kernel.len();
    let diag = kernel.h().to_vec();
    let off: Vec<f64> = (0..len - 1).map(|i| (kernel.p()[i] * kernel.q()[i + 1]).sqrt()).collect();
    let tol = tolerances::EIGENVALUE * 1e-3;
    let lambda2 = tridiag::kth_eigenvalue(&diag, &off, len - 2, tol);
    let lambda_min = tridiag::kth_eigenvalue(&diag, &off, 0, tol);
    Ok(SpectralResult {
        gap: 1.0 - lambda2,
        lambda2,
        lambda_min,
        method: SpectralMethod::TridiagonalBisection,
        dirichlet_bound: dirichlet_bound(kernel, &pi),
    })
}

/// Full spectrum, ascending, from a dense symmetric eigensolve of
/// `D^{1/2} P D^{-1/2}`, `D = diag(pi)`. Intended for small lattices.
pub fn spectrum_dense(kernel: &BirthDeathKernel) -> Result<Vec<f64>> {
    let pi = reversible_stationary(kernel)?;
    Ok(dense_eigenvalues(kernel, &pi))
}

fn dense_eigenvalues(kernel: &BirthDeathKernel, pi: &ProbVector) -> Vec<f64> {
    let len = kernel.len();
    let root: Vec<f64> = pi.mass().iter().map(|m| m.sqrt()).collect();
    let mut a = DMatrix::<f64>::zeros(len, len);
    for i in 0..len {
        for j in i.saturating_sub(1)..(i + 2).min(len) {
            a[(i, j)] = root[i] * kernel.prob(i, j) / root[j];
        }
    }
    // Average out rounding asymmetry before the symmetric solve.
    let sym = (&a + a.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().cloned().collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

/// [`spectral_gap`] computed from the dense spectrum.
pub fn spectral_gap_dense(kernel: &BirthDeathKernel) -> Result<SpectralResult> {
    let pi = reversible_stationary(kernel)?;
    let ev = dense_eigenvalues(kernel, &pi);
    let lambda2 = ev[ev.len() - 2];
    Ok(SpectralResult {
        gap: 1.0 - lambda2,
        lambda2,
        lambda_min: ev[0],
        method: SpectralMethod::DenseOracle,
        dirichlet_bound: dirichlet_bound(kernel, &pi),
    })
}
