use crate::error::{Error, Result};
use crate::model::{p_minus, p_plus, ModelParams};
use crate::tolerances;

use super::lattice::MagLattice;

/// Transition probabilities of a birth-and-death chain on a [`MagLattice`]:
/// `p` up one lattice step (+2 in j), `q` down one step, `h` hold.
#[derive(Debug, Clone, PartialEq)]
pub struct BirthDeathKernel {
    lattice: MagLattice,
    p: Vec<f64>,
    q: Vec<f64>,
    h: Vec<f64>,
    beta: f64,
}

/// Up/down/hold probabilities of the ordinary magnetization chain at spin sum `j`.
///
/// A move up needs a minus spin to be picked (probability (n-j)/2n) and set to
/// plus given the other spins' magnetization (j+1)/n; symmetrically for down.
fn ordinary_row(n: usize, beta: f64, j: i64) -> (f64, f64, f64) {
    let nf = n as f64;
    let s = j as f64 / nf;
    let up = (n as i64 - j) as f64 / (2.0 * nf) * p_plus(s + 1.0 / nf, beta);
    let down = (n as i64 + j) as f64 / (2.0 * nf) * p_minus(s - 1.0 / nf, beta);
    (up, down, 1.0 - up - down)
}

pub fn build_kernel(params: &ModelParams, censored: bool) -> BirthDeathKernel {
    let lattice = MagLattice::new(params.n, censored);
    let len = lattice.len();
    let (mut p, mut q, mut h) = (vec![0.0; len], vec![0.0; len], vec![0.0; len]);
    for i in 0..len {
        let j = lattice.j(i);
        let (up, down, hold) = ordinary_row(params.n, params.beta, j);
        if !censored || j >= 2 {
            p[i] = up;
            q[i] = down;
            h[i] = hold;
        } else if j == 0 {
            // -2 folds onto +2
            p[i] = up + down;
            h[i] = hold;
        } else {
            // j == 1: -1 folds onto +1
            p[i] = up;
            h[i] = hold + down;
        }
    }
    BirthDeathKernel {
        lattice,
        p,
        q,
        h,
        beta: params.beta,
    }
}

impl BirthDeathKernel {
    /// Kernel from explicit arrays; rows must be probability vectors.
    pub fn from_parts(lattice: MagLattice, p: Vec<f64>, q: Vec<f64>, beta: f64) -> Result<Self> {
        let len = lattice.len();
        if p.len() != len || q.len() != len {
            return Err(Error::InvalidParameter(format!(
                "expected {len} entries, got p: {}, q: {}",
                p.len(),
                q.len()
            )));
        }
        if q[0] != 0.0 || p[len - 1] != 0.0 {
            return Err(Error::InvalidParameter("kernel leaves the lattice".into()));
        }
        let mut h = Vec::with_capacity(len);
        for i in 0..len {
            let hold = 1.0 - p[i] - q[i];
            if !(p[i] >= 0.0 && q[i] >= 0.0 && hold >= -tolerances::KERNEL_ROW_SUM) {
                return Err(Error::InvalidParameter(format!("row {i} is not a probability vector")));
            }
            h.push(hold.max(0.0));
        }
        Ok(Self { lattice, p, q, h, beta })
    }

    pub fn lattice(&self) -> &MagLattice {
        &self.lattice
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n(&self) -> usize {
        self.lattice.n()
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    /// Transition probability between lattice indices.
    pub fn prob(&self, from: usize, to: usize) -> f64 {
        if to == from {
            self.h[from]
        } else if to == from + 1 {
            self.p[from]
        } else if to + 1 == from {
            self.q[from]
        } else {
            0.0
        }
    }

    /// `E[s' | s] - s` at each state.
    pub fn drift(&self) -> Vec<f64> {
        let step = 2.0 / self.n() as f64;
        self.p.iter().zip(&self.q).map(|(p, q)| step * (p - q)).collect()
    }

    /// Monotone iff `p_x + q_{x+1} <= 1` on every edge.
    pub fn is_monotone(&self) -> bool {
        (0..self.len() - 1).all(|i| self.p[i] + self.q[i + 1] <= 1.0 + tolerances::KERNEL_ROW_SUM)
    }

    pub fn max_row_sum_error(&self) -> f64 {
        (0..self.len())
            .map(|i| (self.p[i] + self.q[i] + self.h[i] - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Dense row-major transition matrix (small lattices only).
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let len = self.len();
        (0..len).map(|i| (0..len).map(|k| self.prob(i, k)).collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kernel(n: usize, beta: f64, censored: bool) -> BirthDeathKernel {
        build_kernel(&ModelParams::new(n, beta).unwrap(), censored)
    }

    #[test]
    fn rows_sum_to_one() {
        for &n in &[4, 5, 64, 65] {
            for &beta in &[0.8, 1.0, 1.2] {
                for censored in [false, true] {
                    let k = kernel(n, beta, censored);
                    assert!(k.max_row_sum_error() <= tolerances::KERNEL_ROW_SUM, "n={n} beta={beta}");
                    assert!(k.h().iter().all(|&h| h >= 0.0));
                }
            }
        }
    }

    #[test]
    fn censored_bottom_state_even_n() {
        let n = 64;
        let beta = 1.2;
        let k = kernel(n, beta, true);
        assert_eq!(k.q()[0], 0.0);
        let expected = 2.0 * 0.5 * p_minus(-1.0 / n as f64, beta);
        assert!((k.p()[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn censored_bottom_state_odd_n_holds_the_fold() {
        let k = kernel(65, 1.2, true);
        let (up, down, hold) = ordinary_row(65, 1.2, 1);
        assert_eq!(k.q()[0], 0.0);
        assert_eq!(k.p()[0], up);
        assert!((k.h()[0] - (hold + down)).abs() < 1e-16);
    }

    #[test]
    fn top_state_cannot_move_up() {
        for censored in [false, true] {
            let k = kernel(33, 1.4, censored);
            assert_eq!(k.p()[k.len() - 1], 0.0);
        }
        assert_eq!(kernel(33, 1.4, false).q()[0], 0.0);
    }

    #[test]
    fn kernels_are_monotone() {
        for &beta in &[0.5, 1.0, 1.2, 2.0] {
            assert!(kernel(100, beta, false).is_monotone());
            assert!(kernel(100, beta, true).is_monotone());
            assert!(kernel(101, beta, true).is_monotone());
        }
    }

    #[test]
    fn ordinary_kernel_is_symmetric_under_flip() {
        let k = kernel(20, 1.3, false);
        let len = k.len();
        for i in 0..len {
            assert!((k.p()[i] - k.q()[len - 1 - i]).abs() < 1e-15);
        }
    }

    #[test]
    fn interior_rows_match_ordinary_chain() {
        let n = 30;
        let o = kernel(n, 1.1, false);
        let c = kernel(n, 1.1, true);
        for i in 1..c.len() {
            let j = c.lattice().j(i);
            let oi = o.lattice().index_of(j).unwrap();
            assert_eq!(c.p()[i], o.p()[oi]);
            assert_eq!(c.q()[i], o.q()[oi]);
        }
    }

    #[test]
    fn from_parts_validates() {
        let l = MagLattice::new(4, true);
        assert!(BirthDeathKernel::from_parts(l, vec![0.5, 0.5, 0.0], vec![0.0, 0.5, 0.5], 1.0).is_ok());
        assert!(BirthDeathKernel::from_parts(l, vec![0.5, 0.7, 0.0], vec![0.0, 0.5, 0.5], 1.0).is_err());
        assert!(BirthDeathKernel::from_parts(l, vec![0.5, 0.5], vec![0.0, 0.5], 1.0).is_err());
    }
}
