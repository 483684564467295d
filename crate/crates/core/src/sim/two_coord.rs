use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

use super::rng::draw;
use super::spins::{AgreementCounter, FlipTable, SpinConfig};

/// Agreement statistics of two censored dynamics at one checkpoint. `U` and
/// `V` count agreements with the plus and minus sets of the first chain's
/// starting configuration `sigma0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoCoordStats {
    pub t: u64,
    pub u_count: usize,
    pub v_count: usize,
    /// `|U(X_t) - U(X~_t)|`
    pub r: usize,
    /// Every one of `U, U(sigma0) - U, V, V(sigma0) - V` is at least `n/20`.
    pub in_xi: bool,
    /// `|S(X_t)| <= 1/2`
    pub in_omega0: bool,
    pub s: f64,
    pub s_tilde: f64,
}

/// Runs the censored dynamics from `sigma0` and from `sigma_tilde` with
/// independent draws (`rng` and `rng_tilde`) and records the statistics at
/// each checkpoint.
pub fn two_coord_experiment<R: Rng + ?Sized>(
    sigma0: &SpinConfig,
    sigma_tilde: &SpinConfig,
    params: &ModelParams,
    checkpoints: &[u64],
    rng: &mut R,
    rng_tilde: &mut R,
) -> Result<Vec<TwoCoordStats>> {
    let n = sigma0.n();
    if sigma_tilde.n() != n || params.n != n {
        return Err(Error::InvalidParameter("configurations of different sizes".into()));
    }
    if sigma0.magnetization().abs() > 0.5 {
        return Err(Error::InvalidParameter(format!(
            "starting magnetization {} outside [-1/2, 1/2]",
            sigma0.magnetization()
        )));
    }
    let mut sorted = checkpoints.to_vec();
    sorted.sort_unstable();
    sorted.dedup();

    let table = FlipTable::new(params);
    let mut x = sigma0.clone();
    let mut y = sigma_tilde.clone();
    let mut cx = AgreementCounter::new(sigma0, &x);
    let mut cy = AgreementCounter::new(sigma0, &y);
    let (u0, v0) = cx.totals();
    let floor = n as f64 / 20.0;

    let mut out = Vec::with_capacity(sorted.len());
    let mut t = 0u64;
    for &stop in &sorted {
        while t < stop {
            let d = draw(rng, n);
            let (old, new) = x.step(d, &table, true);
            cx.record(d.site, old, new);
            let d = draw(rng_tilde, n);
            let (old, new) = y.step(d, &table, true);
            cy.record(d.site, old, new);
            t += 1;
        }
        let (u, v) = (cx.u(&x), cx.v(&x));
        let in_xi = [u, u0 - u, v, v0 - v].iter().all(|&c| c as f64 >= floor);
        out.push(TwoCoordStats {
            t,
            u_count: u,
            v_count: v,
            r: u.abs_diff(cy.u(&y)),
            in_xi,
            in_omega0: x.magnetization().abs() <= 0.5,
            s: x.magnetization(),
            s_tilde: y.magnetization(),
        });
    }
    Ok(out)
}

/// Whether the censored dynamics from `start` lies in `{|S| <= 1/2}` after
/// `steps` updates.
pub fn burn_in_reaches_omega0<R: Rng + ?Sized>(start: &SpinConfig, params: &ModelParams, steps: u64, rng: &mut R) -> bool {
    let table = FlipTable::new(params);
    let mut x = start.clone();
    for _ in 0..steps {
        x.step(draw(rng, x.n()), &table, true);
    }
    x.magnetization().abs() <= 0.5
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::rng::replica_rng;

    #[test]
    fn identical_chains_have_zero_r() {
        let p = ModelParams::new(200, 1.2).unwrap();
        let s0 = SpinConfig::with_sum(200, 0).unwrap();
        let stats =
            two_coord_experiment(&s0, &s0, &p, &[0, 10, 1000, 5000], &mut replica_rng(3, 0), &mut replica_rng(3, 0)).unwrap();
        assert!(stats.iter().all(|s| s.r == 0));
        assert_eq!(stats.len(), 4);
    }

    #[test]
    fn counts_respect_their_bounds() {
        let n = 120;
        let p = ModelParams::new(n, 1.3).unwrap();
        let s0 = SpinConfig::with_sum(n, 20).unwrap();
        let (u0, v0) = (70, 50);
        let cps: Vec<u64> = (0..50).map(|k| k * 200).collect();
        let stats =
            two_coord_experiment(&s0, &SpinConfig::all_plus(n), &p, &cps, &mut replica_rng(1, 0), &mut replica_rng(1, 1)).unwrap();
        let first = stats[0];
        assert_eq!((first.u_count, first.v_count), (u0, v0));
        // U(sigma0) - U = 0 at the start
        assert!(!first.in_xi && first.in_omega0);
        for s in &stats {
            assert!(s.u_count <= u0 && s.v_count <= v0 && s.u_count + s.v_count <= n);
        }
    }

    #[test]
    fn start_outside_omega0_rejected() {
        let p = ModelParams::new(20, 1.2).unwrap();
        let s0 = SpinConfig::all_plus(20);
        assert!(two_coord_experiment(&s0, &s0, &p, &[1], &mut replica_rng(0, 0), &mut replica_rng(0, 1)).is_err());
    }
}
