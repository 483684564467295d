use crate::error::{Error, Result};
use crate::tolerances;

use super::kernel::BirthDeathKernel;
use super::lattice::MagLattice;

/// A probability distribution over a magnetization lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector {
    lattice: MagLattice,
    mass: Vec<f64>,
}

impl ProbVector {
    pub fn new(lattice: MagLattice, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != lattice.len() {
            return Err(Error::LatticeMismatch {
                dist: mass.len(),
                kernel: lattice.len(),
            });
        }
        if mass.iter().any(|&m| !(m >= 0.0)) {
            return Err(Error::InvalidParameter("negative or NaN mass".into()));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > tolerances::PROB_MASS {
            return Err(Error::InvalidParameter(format!("total mass {total} != 1")));
        }
        Ok(Self { lattice, mass })
    }

    pub fn point(lattice: MagLattice, index: usize) -> Self {
        let mut mass = vec![0.0; lattice.len()];
        mass[index] = 1.0;
        Self { lattice, mass }
    }

    pub fn lattice(&self) -> &MagLattice {
        &self.lattice
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        moments(self, 0.0, &[1])[0]
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        moments(self, m, &[2])[0]
    }

    /// Mass of the closed interval `[lo, hi]` in s-coordinates.
    pub fn interval_mass(&self, lo: f64, hi: f64) -> f64 {
        self.mass
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let s = self.lattice.s(*i);
                s >= lo && s <= hi
            })
            .map(|(_, m)| m)
            .sum()
    }

    /// One application of the kernel, written into `out`.
    fn step_into(&self, kernel: &BirthDeathKernel, out: &mut [f64]) {
        step_slice(&self.mass, kernel, out);
    }
}

fn step_slice(v: &[f64], kernel: &BirthDeathKernel, out: &mut [f64]) {
    let (p, q, h) = (kernel.p(), kernel.q(), kernel.h());
    let len = v.len();
    for i in 0..len {
        let mut acc = v[i] * h[i];
        if i > 0 {
            acc += v[i - 1] * p[i - 1];
        }
        if i + 1 < len {
            acc += v[i + 1] * q[i + 1];
        }
        out[i] = acc;
    }
}

/// Stationary law by the detailed-balance recursion
/// `pi(x+1) = pi(x) p_x / q_{x+1}`, accumulated in log-space.
pub fn stationary(kernel: &BirthDeathKernel) -> Result<ProbVector> {
    let lattice = *kernel.lattice();
    let (p, q) = (kernel.p(), kernel.q());
    let len = kernel.len();
    let mut log_pi = vec![0.0; len];
    for i in 0..len - 1 {
        if p[i] <= 0.0 || q[i + 1] <= 0.0 {
            return Err(Error::Reducible {
                from: lattice.j(i),
                to: lattice.j(i + 1),
            });
        }
        log_pi[i + 1] = log_pi[i] + p[i].ln() - q[i + 1].ln();
    }
    let top = log_pi.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut mass: Vec<f64> = log_pi.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = mass.iter().sum();
    mass.iter_mut().for_each(|m| *m /= total);
    Ok(ProbVector { lattice, mass })
}

/// max_x |(pi P)(x) - pi(x)|
pub fn stationary_residual(pi: &ProbVector, kernel: &BirthDeathKernel) -> f64 {
    let mut out = vec![0.0; pi.mass.len()];
    pi.step_into(kernel, &mut out);
    out.iter().zip(&pi.mass).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Count of mass renormalizations performed during an evolution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvolveStats {
    pub renormalizations: u64,
}

/// `dist * P^steps`.
pub fn evolve(dist: &ProbVector, kernel: &BirthDeathKernel, steps: u64) -> Result<ProbVector> {
    evolve_with_stats(dist, kernel, steps).map(|(d, _)| d)
}

pub fn evolve_with_stats(
    dist: &ProbVector,
    kernel: &BirthDeathKernel,
    steps: u64,
) -> Result<(ProbVector, EvolveStats)> {
    if dist.lattice != *kernel.lattice() {
        return Err(Error::LatticeMismatch {
            dist: dist.mass.len(),
            kernel: kernel.len(),
        });
    }
    let mut stats = EvolveStats::default();
    let mut cur = dist.mass.clone();
    let mut next = vec![0.0; cur.len()];
    for _ in 0..steps {
        step_slice(&cur, kernel, &mut next);
        std::mem::swap(&mut cur, &mut next);
        renormalize(&mut cur, &mut stats);
    }
    Ok((
        ProbVector {
            lattice: dist.lattice,
            mass: cur,
        },
        stats,
    ))
}

fn renormalize(mass: &mut [f64], stats: &mut EvolveStats) {
    let total: f64 = mass.iter().sum();
    if (total - 1.0).abs() > tolerances::PROB_MASS {
        mass.iter_mut().for_each(|m| *m /= total);
        stats.renormalizations += 1;
    }
}

/// In-place stepping used by the mixing profiles.
pub(crate) struct Stepper<'a> {
    kernel: &'a BirthDeathKernel,
    scratch: Vec<f64>,
    pub(crate) stats: EvolveStats,
}

impl<'a> Stepper<'a> {
    pub(crate) fn new(kernel: &'a BirthDeathKernel) -> Self {
        Self {
            kernel,
            scratch: vec![0.0; kernel.len()],
            stats: EvolveStats::default(),
        }
    }

    pub(crate) fn advance(&mut self, dist: &mut ProbVector, steps: u64) {
        for _ in 0..steps {
            step_slice(&dist.mass, self.kernel, &mut self.scratch);
            std::mem::swap(&mut dist.mass, &mut self.scratch);
            renormalize(&mut dist.mass, &mut self.stats);
        }
    }
}

/// Total-variation distance, `(1/2) sum |a - b|`.
pub fn tv_distance(a: &ProbVector, b: &ProbVector) -> f64 {
    0.5 * a.mass.iter().zip(&b.mass).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// `sum_x dist(x) (s(x) - center)^k` for each requested order `k`.
pub fn moments(dist: &ProbVector, center: f64, orders: &[u32]) -> Vec<f64> {
    orders
        .iter()
        .map(|&k| {
            dist.mass
                .iter()
                .enumerate()
                .map(|(i, m)| m * (dist.lattice.s(i) - center).powi(k as i32))
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::kernel::build_kernel;
    use crate::model::ModelParams;

    fn kernel(n: usize, beta: f64, censored: bool) -> BirthDeathKernel {
        build_kernel(&ModelParams::new(n, beta).unwrap(), censored)
    }

    #[test]
    fn stationary_is_a_fixed_point() {
        let k = kernel(512, 1.2, true);
        let pi = stationary(&k).unwrap();
        assert!(stationary_residual(&pi, &k) <= tolerances::STATIONARY_RESIDUAL);
        assert!((pi.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn detailed_balance_on_every_edge() {
        for censored in [false, true] {
            let k = kernel(300, 1.3, censored);
            let pi = stationary(&k).unwrap();
            for i in 0..k.len() - 1 {
                let fwd = pi.mass()[i] * k.p()[i];
                let back = pi.mass()[i + 1] * k.q()[i + 1];
                assert!((fwd - back).abs() <= 1e-12, "edge {i}");
            }
        }
    }

    #[test]
    fn stationary_mass_concentrates_near_zeta() {
        let params = ModelParams::new(1024, 1.2).unwrap();
        let k = build_kernel(&params, true);
        let pi = stationary(&k).unwrap();
        let z = params.zeta().unwrap();
        let w = 10.0 / (params.delta * params.n as f64).sqrt();
        assert!(pi.interval_mass(z - w, z + w) >= 0.9);
    }

    #[test]
    fn zero_interior_rate_is_reducible() {
        let l = MagLattice::new(4, true);
        let k = BirthDeathKernel::from_parts(l, vec![0.5, 0.0, 0.0], vec![0.0, 0.5, 0.5], 1.0).unwrap();
        assert!(matches!(stationary(&k), Err(Error::Reducible { from: 2, to: 4 })));
    }

    #[test]
    fn evolve_zero_steps_is_identity() {
        let k = kernel(40, 1.1, true);
        let d = ProbVector::point(*k.lattice(), 7);
        assert_eq!(evolve(&d, &k, 0).unwrap(), d);
    }

    #[test]
    fn one_step_from_top_has_kernel_row_support() {
        for censored in [false, true] {
            let k = kernel(40, 1.1, censored);
            let top = k.lattice().top();
            let d = evolve(&ProbVector::point(*k.lattice(), top), &k, 1).unwrap();
            let support: Vec<usize> = (0..k.len()).filter(|&i| d.mass()[i] > 0.0).collect();
            assert_eq!(support, vec![top - 1, top]);
            assert_eq!(d.mass()[top - 1], k.q()[top]);
            assert_eq!(d.mass()[top], k.h()[top]);
        }
    }

    #[test]
    fn long_evolution_conserves_mass() {
        let k = kernel(64, 1.2, true);
        let (d, stats) = evolve_with_stats(&ProbVector::point(*k.lattice(), 0), &k, 1_000_000).unwrap();
        assert!((d.total() - 1.0).abs() <= 1e-12);
        assert!(stats.renormalizations <= 1_000_000);
    }

    #[test]
    fn mismatched_lattice_rejected() {
        let k = kernel(10, 1.1, true);
        let d = ProbVector::point(MagLattice::new(10, false), 0);
        assert!(matches!(evolve(&d, &k, 1), Err(Error::LatticeMismatch { .. })));
    }

    #[test]
    fn point_mass_central_moments_vanish() {
        let l = MagLattice::new(16, false);
        let d = ProbVector::point(l, 5);
        assert_eq!(moments(&d, l.s(5), &[1, 2, 3, 4]), vec![0.0; 4]);
    }

    #[test]
    fn ordinary_chain_from_zero_stays_centered() {
        let k = kernel(64, 1.3, false);
        let start = k.lattice().index_of(0).unwrap();
        let mut d = ProbVector::point(*k.lattice(), start);
        for _ in 0..20 {
            d = evolve(&d, &k, 25).unwrap();
            assert!(d.mean().abs() < 1e-14);
        }
    }

    #[test]
    fn tv_from_point_mass() {
        let k = kernel(50, 1.2, true);
        let pi = stationary(&k).unwrap();
        let d = ProbVector::point(*k.lattice(), 3);
        assert!((tv_distance(&d, &pi) - (1.0 - pi.mass()[3])).abs() < 1e-15);
    }

    #[test]
    fn prob_vector_validation() {
        let l = MagLattice::new(4, true);
        assert!(ProbVector::new(l, vec![0.5, 0.5, 0.0]).is_ok());
        assert!(ProbVector::new(l, vec![0.5, 0.6, 0.0]).is_err());
        assert!(ProbVector::new(l, vec![1.5, -0.5, 0.0]).is_err());
        assert!(ProbVector::new(l, vec![1.0]).is_err());
    }
}
