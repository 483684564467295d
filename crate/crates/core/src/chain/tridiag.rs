//! Eigenvalues of symmetric tridiagonal matrices by Sturm-sequence bisection.

use crate::tolerances;

/// Number of eigenvalues strictly below `lambda`, from the signs of the LDLT
/// pivots of `T - lambda I`.
pub fn sturm_count(diag: &[f64], off: &[f64], lambda: f64) -> usize {
    let mut count = 0;
    let mut pivot: f64 = 1.0;
    for i in 0..diag.len() {
        let coupling = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        let prev = if pivot.abs() < tolerances::STURM_PIVOT_GUARD {
            tolerances::STURM_PIVOT_GUARD.copysign(pivot)
        } else {
            pivot
        };
        pivot = (diag[i] - lambda) - if i == 0 { 0.0 } else { coupling / prev };
        if pivot < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin interval containing the whole spectrum.
pub fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let len = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..len {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < len { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    (lo, hi)
}

/// The `k`-th smallest eigenvalue (0-based), bisected until the bracket is
/// narrower than `tol` or stops shrinking.
pub fn kth_eigenvalue(diag: &[f64], off: &[f64], k: usize, tol: f64) -> f64 {
    assert!(k < diag.len(), "eigenvalue index out of range");
    let (mut lo, mut hi) = gershgorin(diag, off);
    lo -= tol;
    hi += tol;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) <= k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All eigenvalues in ascending order.
pub fn eigenvalues(diag: &[f64], off: &[f64], tol: f64) -> Vec<f64> {
    (0..diag.len()).map(|k| kth_eigenvalue(diag, off, k, tol)).collect()
}
