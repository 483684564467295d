use rand::Rng;

use crate::chain::{build_kernel, BirthDeathKernel, Start};
use crate::error::{Error, Result};
use crate::model::ModelParams;

use super::hitting::mag_step;
use super::spins::{FlipTable, SpinConfig, UpdateDraw};

/// Shared-draw update of an ordered pair of ordinary configurations.
/// The heat-bath probability is increasing in the other spins' sum, so
/// `hi >= lo` coordinatewise is preserved.
pub fn monotone_pair_step(hi: &mut SpinConfig, lo: &mut SpinConfig, draw: UpdateDraw, table: &FlipTable) -> Result<()> {
    if let Some(site) = hi.first_order_violation(lo) {
        return Err(Error::OrderViolation { site });
    }
    pair_step(hi, lo, draw, table, false);
    Ok(())
}

/// Shared-draw update without the ordering check. With `censored` this is the
/// naive coupling of the censored dynamics, which is not monotone.
pub fn pair_step(a: &mut SpinConfig, b: &mut SpinConfig, draw: UpdateDraw, table: &FlipTable, censored: bool) {
    a.step(draw, table, censored);
    b.step(draw, table, censored);
}

/// The ordered pair on which the censored shared-draw coupling breaks:
/// `lo` has sum 0 (or 1 for odd n), `hi` equals `lo` with one more plus spin.
pub fn counterexample_pair(n: usize) -> (SpinConfig, SpinConfig) {
    let lo = SpinConfig::with_sum(n, (n % 2) as i64).unwrap();
    let hi = SpinConfig::with_sum(n, (n % 2) as i64 + 2).unwrap();
    (hi, lo)
}

/// Number of `trials` single shared-draw censored steps, each from the
/// counterexample pair, after which `hi >= lo` fails.
pub fn censored_order_violations<R: Rng + ?Sized>(params: &ModelParams, trials: u64, rng: &mut R) -> u64 {
    let table = FlipTable::new(params);
    let (hi0, lo0) = counterexample_pair(params.n);
    let mut violations = 0;
    for _ in 0..trials {
        let (mut hi, mut lo) = (hi0.clone(), lo0.clone());
        pair_step(&mut hi, &mut lo, super::rng::draw(rng, params.n), &table, true);
        if hi.first_order_violation(&lo).is_some() {
            violations += 1;
        }
    }
    violations
}

/// Coalescence time of two censored magnetization chains.
///
/// The chains move independently until they are within one lattice step of
/// each other or either is below `(7/6) sqrt(delta)`; from then on they share
/// their uniforms (monotone coupling) until they meet.
pub fn mag_coupling_coalescence<R: Rng + ?Sized>(
    s0: Start,
    s0_other: Start,
    params: &ModelParams,
    max_steps: u64,
    rng: &mut R,
) -> Result<u64> {
    let kernel = build_kernel(params, true);
    mag_coupling_coalescence_on(&kernel, params, s0, s0_other, max_steps, rng)
}

/// [`mag_coupling_coalescence`] with a prebuilt censored kernel.
pub fn mag_coupling_coalescence_on<R: Rng + ?Sized>(
    kernel: &BirthDeathKernel,
    params: &ModelParams,
    s0: Start,
    s0_other: Start,
    max_steps: u64,
    rng: &mut R,
) -> Result<u64> {
    let lattice = kernel.lattice();
    let mut x = s0.resolve(lattice)?;
    let mut y = s0_other.resolve(lattice)?;
    if x == y {
        return Ok(0);
    }
    let floor = 7.0 / 6.0 * params.delta.max(0.0).sqrt();
    let mut shared = false;
    for t in 1..=max_steps {
        if !shared {
            shared = x.abs_diff(y) <= 1 || lattice.s(x) < floor || lattice.s(y) < floor;
        }
        if shared {
            let u = rng.random::<f64>();
            x = mag_step(kernel, x, u);
            y = mag_step(kernel, y, u);
        } else {
            x = mag_step(kernel, x, rng.random::<f64>());
            y = mag_step(kernel, y, rng.random::<f64>());
        }
        if x == y {
            return Ok(t);
        }
    }
    Err(Error::NotCoalesced { max_steps })
}

/// Samples `(D_t, D_{t+1} - D_t)` of the gap `D_t` between two censored
/// magnetization chains under the shared-uniform monotone coupling, recorded
/// while both chains are at or above `region_floor` and `D_t > 0`.
pub fn gap_drift_samples<R: Rng + ?Sized>(
    kernel: &BirthDeathKernel,
    hi: Start,
    lo: Start,
    region_floor: f64,
    steps: u64,
    rng: &mut R,
) -> Result<Vec<(f64, f64)>> {
    let lattice = kernel.lattice();
    let mut y = hi.resolve(lattice)?;
    let mut x = lo.resolve(lattice)?;
    if x > y {
        std::mem::swap(&mut x, &mut y);
    }
    let mut out = Vec::new();
    for _ in 0..steps {
        if x == y {
            break;
        }
        let d = lattice.s(y) - lattice.s(x);
        let inside = lattice.s(x) >= region_floor;
        let u = rng.random::<f64>();
        x = mag_step(kernel, x, u);
        y = mag_step(kernel, y, u);
        if inside {
            out.push((d, lattice.s(y) - lattice.s(x) - d));
        }
    }
    Ok(out)
}

/// Mean of `y` binned by `x` into `bins` equal-width bins over `[lo, hi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub mean: f64,
    /// Standard error of the mean.
    pub se: f64,
}

pub fn binned_means(samples: &[(f64, f64)], lo: f64, hi: f64, bins: usize) -> Vec<Bin> {
    let width = (hi - lo) / bins as f64;
    let mut acc = vec![(0usize, 0.0f64, 0.0f64); bins];
    for &(x, y) in samples {
        if x < lo || x >= hi {
            continue;
        }
        let b = (((x - lo) / width) as usize).min(bins - 1);
        acc[b].0 += 1;
        acc[b].1 += y;
        acc[b].2 += y * y;
    }
    acc.iter()
        .enumerate()
        .map(|(b, &(count, sum, sq))| {
            let mean = if count > 0 { sum / count as f64 } else { 0.0 };
            let var = if count > 1 {
                (sq - count as f64 * mean * mean) / (count - 1) as f64
            } else {
                0.0
            };
            Bin {
                lo: lo + b as f64 * width,
                hi: lo + (b + 1) as f64 * width,
                count,
                mean,
                se: (var.max(0.0) / count.max(1) as f64).sqrt(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::rng::{draw, replica_rng};

    #[test]
    fn equal_configs_stay_equal() {
        let p = ModelParams::new(30, 1.2).unwrap();
        let t = FlipTable::new(&p);
        let mut a = SpinConfig::with_sum(30, 4).unwrap();
        let mut b = a.clone();
        let mut rng = replica_rng(1, 0);
        for _ in 0..1000 {
            monotone_pair_step(&mut a, &mut b, draw(&mut rng, 30), &t).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn unordered_input_is_rejected() {
        let p = ModelParams::new(4, 1.2).unwrap();
        let t = FlipTable::new(&p);
        let mut hi = SpinConfig::from_spins(vec![1, -1, 1, -1]).unwrap();
        let mut lo = SpinConfig::from_spins(vec![-1, 1, -1, -1]).unwrap();
        let d = UpdateDraw { site: 0, u: 0.5 };
        assert_eq!(monotone_pair_step(&mut hi, &mut lo, d, &t), Err(Error::OrderViolation { site: 1 }));
    }

    #[test]
    fn monotone_pair_from_extremes() {
        let n = 64;
        let p = ModelParams::new(n, 1.2).unwrap();
        let t = FlipTable::new(&p);
        let mut hi = SpinConfig::all_plus(n);
        let mut lo = SpinConfig::all_minus(n);
        let mut rng = replica_rng(2, 0);
        for _ in 0..5000 {
            monotone_pair_step(&mut hi, &mut lo, draw(&mut rng, n), &t).unwrap();
        }
    }

    #[test]
    fn censored_shared_draw_breaks_ordering() {
        let p = ModelParams::new(10, 1.2).unwrap();
        let v = censored_order_violations(&p, 10_000, &mut replica_rng(4, 0));
        assert!(v > 0);
    }

    #[test]
    fn same_start_coalesces_at_once() {
        let p = ModelParams::new(100, 1.2).unwrap();
        assert_eq!(mag_coupling_coalescence(Start::Top, Start::AllPlus, &p, 10, &mut replica_rng(0, 0)), Ok(0));
    }

    #[test]
    fn coalescence_happens_for_small_chains() {
        let p = ModelParams::new(50, 1.2).unwrap();
        let t = mag_coupling_coalescence(Start::Bottom, Start::Top, &p, 1_000_000, &mut replica_rng(0, 0)).unwrap();
        assert!(t > 0);
    }

    #[test]
    fn shared_uniform_never_crosses() {
        let p = ModelParams::new(200, 1.2).unwrap();
        let k = build_kernel(&p, true);
        let mut rng = replica_rng(8, 0);
        let (mut x, mut y) = (0usize, k.len() - 1);
        for _ in 0..200_000 {
            let u = rng.random::<f64>();
            x = mag_step(&k, x, u);
            y = mag_step(&k, y, u);
            assert!(x <= y);
        }
    }

    #[test]
    fn binning() {
        let s = vec![(0.1, 1.0), (0.15, 3.0), (0.7, -2.0), (2.0, 100.0)];
        let b = binned_means(&s, 0.0, 1.0, 2);
        assert_eq!(b[0].count, 2);
        assert_eq!(b[0].mean, 2.0);
        assert_eq!(b[1].count, 1);
        assert_eq!(b[1].mean, -2.0);
    }
}
