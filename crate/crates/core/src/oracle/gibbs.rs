use crate::error::Result;

use super::space::ConfigSpace;

/// Exact Gibbs measure `mu(sigma) ~ exp((beta/n) sum_{x<y} sigma(x) sigma(y))`
/// over all configurations, or its fold onto `{S >= 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsMeasure {
    pub n: usize,
    pub beta: f64,
    pub space: ConfigSpace,
    pub mass: Vec<f64>,
}

fn log_binomial(n: usize, k: usize) -> f64 {
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}

/// Log-probability of a single configuration with spin sum `m`, per level.
/// The pair energy is `(m^2 - n) / 2`.
fn level_log_mass(n: usize, beta: f64) -> Vec<f64> {
    let log_w: Vec<f64> = (0..=n)
        .map(|k| {
            let m = 2.0 * k as f64 - n as f64;
            beta / n as f64 * (m * m - n as f64) / 2.0
        })
        .collect();
    let terms: Vec<f64> = (0..=n).map(|k| log_binomial(n, k) + log_w[k]).collect();
    let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let log_z = top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln();
    log_w.iter().map(|w| w - log_z).collect()
}

pub fn gibbs(n: usize, beta: f64) -> Result<GibbsMeasure> {
    let space = ConfigSpace::new(n, false)?;
    let level = level_log_mass(n, beta);
    let mass = (0..space.len())
        .map(|i| level[space.mask(i).count_ones() as usize].exp())
        .collect();
    Ok(GibbsMeasure { n, beta, space, mass })
}

/// `mu~(sigma) = mu(sigma) + mu(-sigma)` for `S > 0`, `mu(sigma)` for `S = 0`.
pub fn gibbs_folded(n: usize, beta: f64) -> Result<GibbsMeasure> {
    let space = ConfigSpace::new(n, true)?;
    let level = level_log_mass(n, beta);
    let mass = (0..space.len())
        .map(|i| {
            let m = level[space.mask(i).count_ones() as usize].exp();
            if space.sum(i) > 0 {
                2.0 * m
            } else {
                m
            }
        })
        .collect();
    Ok(GibbsMeasure { n, beta, space, mass })
}

impl GibbsMeasure {
    /// Marginal of the spin sum, indexed by `(j - j_min) / 2` on the
    /// matching magnetization lattice.
    pub fn magnetization_marginal(&self) -> Vec<f64> {
        project(&self.space, &self.mass)
    }
}

/// Pushes a distribution on configurations forward to the spin sum.
pub fn project(space: &ConfigSpace, dist: &[f64]) -> Vec<f64> {
    let n = space.n() as i64;
    let j_min = if space.censored() { n % 2 } else { -n };
    let mut out = vec![0.0; ((n - j_min) / 2 + 1) as usize];
    for (i, m) in dist.iter().enumerate() {
        out[((space.sum(i) - j_min) / 2) as usize] += m;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn infinite_temperature_is_uniform() {
        let g = gibbs(9, 0.0).unwrap();
        for m in &g.mass {
            assert!((m - 1.0 / 512.0).abs() < 1e-16);
        }
    }

    #[test]
    fn global_flip_symmetry() {
        let g = gibbs(10, 1.3).unwrap();
        for i in 0..g.space.len() {
            let j = g.space.index_of(g.space.negate(g.space.mask(i))).unwrap();
            assert_eq!(g.mass[i], g.mass[j]);
        }
    }

    #[test]
    fn normalized_and_proportional_to_pair_weight() {
        let (n, beta) = (8, 1.7);
        let g = gibbs(n, beta).unwrap();
        assert!((g.mass.iter().sum::<f64>() - 1.0).abs() < 1e-13);
        let direct: Vec<f64> = (0..g.space.len())
            .map(|i| {
                let mask = g.space.mask(i);
                let spin = |x: usize| if mask >> x & 1 == 1 { 1.0 } else { -1.0 };
                let mut e = 0.0;
                for x in 0..n {
                    for y in x + 1..n {
                        e += spin(x) * spin(y);
                    }
                }
                (beta / n as f64 * e).exp()
            })
            .collect();
        let ratio = g.mass[0] / direct[0];
        for (a, b) in g.mass.iter().zip(&direct) {
            assert!((a / b - ratio).abs() < 1e-12 * ratio);
        }
    }

    #[test]
    fn bimodal_marginal_at_low_temperature() {
        let (n, beta) = (12, 1.3);
        let g = gibbs(n, beta).unwrap();
        let marginal = g.magnetization_marginal();
        let best = (0..marginal.len()).max_by(|&a, &b| marginal[a].partial_cmp(&marginal[b]).unwrap()).unwrap();
        // Mode read off the enumeration: spin sum +-10 (s = 5/6), the lattice
        // point nearest zeta(1.3) = 0.7521.
        let j = 2 * best as i64 - n as i64;
        assert_eq!(j.abs(), 10);
        assert_eq!(marginal[best], marginal[marginal.len() - 1 - best]);
        assert!(marginal[n / 2] < marginal[best]);
    }

    #[test]
    fn folded_measure_is_normalized() {
        for n in [7, 8] {
            let g = gibbs_folded(n, 1.2).unwrap();
            assert!((g.mass.iter().sum::<f64>() - 1.0).abs() < 1e-13);
            assert!(g.space.len() < 1 << n);
        }
    }

    #[test]
    fn too_large() {
        assert_eq!(gibbs(13, 1.0).unwrap_err(), Error::TooLarge { n: 13, limit: 12 });
    }
}
