use nalgebra::linalg::Schur;
use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

use crate::tolerances;

use super::full_kernel::FullKernel;
use super::space::MAX_EIGEN_N;

fn check_size(kernel: &FullKernel) -> Result<()> {
    if kernel.n > MAX_EIGEN_N {
        return Err(Error::TooLarge {
            n: kernel.n,
            limit: MAX_EIGEN_N,
        });
    }
    Ok(())
}

fn dense(kernel: &FullKernel) -> DMatrix<f64> {
    let len = kernel.len();
    let mut a = DMatrix::<f64>::zeros(len, len);
    for (i, row) in kernel.rows.iter().enumerate() {
        for &(j, p) in row {
            a[(i, j)] = p;
        }
    }
    a
}

/// All eigenvalues, ascending.
///
/// A kernel reversible with respect to `mu` is symmetrized as
/// `D^{1/2} P D^{-1/2}` and solved with a symmetric eigensolver. The censored
/// dynamics with `n` even is not reversible (from the zero-magnetization
/// layer, `sigma -> -sigma'` has no reverse move), so it goes through a real
/// Schur decomposition; its spectrum is still real and the imaginary parts
/// are checked to vanish.
pub fn dense_spectrum(kernel: &FullKernel, mu: &[f64]) -> Result<Vec<f64>> {
    check_size(kernel)?;
    let mut ev: Vec<f64> = if kernel.detailed_balance_residual(mu) <= tolerances::DETAILED_BALANCE * 1e-2 {
        let root: Vec<f64> = mu.iter().map(|m| m.sqrt()).collect();
        let mut a = dense(kernel);
        for i in 0..kernel.len() {
            for j in 0..kernel.len() {
                a[(i, j)] *= root[i] / root[j];
            }
        }
        let sym = (&a + a.transpose()) * 0.5;
        SymmetricEigen::new(sym).eigenvalues.iter().cloned().collect()
    } else {
        let schur = Schur::try_new(dense(kernel), 1e-14, 10_000_000).ok_or(Error::NoConvergence {
            iterations: 10_000_000,
            residual: f64::NAN,
        })?;
        let complex = schur.complex_eigenvalues();
        let worst_imag = complex.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        if worst_imag > tolerances::ORACLE_EIGEN_AGREEMENT {
            return Err(Error::InvalidParameter(format!(
                "spectrum is not real (imaginary part {worst_imag:e})"
            )));
        }
        complex.iter().map(|z| z.re).collect()
    };
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(ev)
}

pub fn dense_lambda2(kernel: &FullKernel, mu: &[f64]) -> Result<f64> {
    let ev = dense_spectrum(kernel, mu)?;
    Ok(ev[ev.len() - 2])
}

/// Second eigenvalue by power iteration on the lazy kernel `(I + P) / 2`
/// acting on functions, with the constant eigenfunction projected out
/// (`f <- f - E_mu f`) at every step. The lazy shift maps a real spectrum in
/// `(-1, 1]` into `(0, 1]`, so the dominant remaining eigenvalue is
/// `(1 + lambda2) / 2`.
pub fn power_lambda2(kernel: &FullKernel, mu: &[f64], tol: f64, max_iter: usize) -> Result<f64> {
    check_size(kernel)?;
    let len = kernel.len();
    let p = dense(kernel);
    let lazy = (DMatrix::<f64>::identity(len, len) + p) * 0.5;
    let mu = DVector::from_column_slice(mu);

    // Deterministic start with a component on every coordinate.
    let mut f = DVector::from_iterator(len, (0..len).map(|i| 1.0 + ((i * 7919) % 101) as f64 / 101.0));
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let mean = mu.dot(&f);
        f.add_scalar_mut(-mean);
        f /= f.norm();
        let g = &lazy * &f;
        let rho = f.dot(&g);
        residual = (&g - &f * rho).norm();
        f = g;
        if residual <= tol {
            return Ok(2.0 * rho - 1.0);
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter as u64,
        residual,
    })
}

/// True when every value in `sub` has a distinct partner in `sup` within
/// `tol` (multiset containment of sorted spectra).
pub fn spectrum_contained(sub: &[f64], sup: &[f64], tol: f64) -> bool {
    let mut used = vec![false; sup.len()];
    sub.iter().all(|&x| {
        let hit = (0..sup.len())
            .filter(|&k| !used[k] && (sup[k] - x).abs() <= tol)
            .min_by(|&a, &b| (sup[a] - x).abs().partial_cmp(&(sup[b] - x).abs()).unwrap());
        match hit {
            Some(k) => {
                used[k] = true;
                true
            }
            None => false,
        }
    })
}
