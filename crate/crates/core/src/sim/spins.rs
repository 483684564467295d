use crate::error::{Error, Result};
use crate::model::{p_plus, ModelParams};

/// Site and uniform variable driving one heat-bath update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateDraw {
    pub site: usize,
    pub u: f64,
}

/// `p_plus(k / n)` for every possible sum `k` of the other spins.
#[derive(Debug, Clone)]
pub struct FlipTable {
    n: usize,
    p_up: Vec<f64>,
}

impl FlipTable {
    pub fn new(params: &ModelParams) -> Self {
        let n = params.n;
        let nf = n as f64;
        let p_up = (0..2 * n + 3)
            .map(|idx| p_plus((idx as f64 - nf - 1.0) / nf, params.beta))
            .collect();
        Self { n, p_up }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Probability of setting a spin to +1 when the others sum to `others`.
    #[inline]
    pub fn p_up(&self, others: i64) -> f64 {
        self.p_up[(others + self.n as i64 + 1) as usize]
    }
}

/// Spin configuration with a cached sum.
///
/// Under censoring a global negation is recorded in `flipped` instead of
/// rewriting the array; `spin(i)` resolves it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinConfig {
    stored: Vec<i8>,
    sum: i64,
    flipped: bool,
}

impl SpinConfig {
    pub fn from_spins(spins: Vec<i8>) -> Result<Self> {
        if spins.len() < 2 {
            return Err(Error::InvalidParameter("need at least two spins".into()));
        }
        if let Some(i) = spins.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidParameter(format!("spin {i} is not +-1")));
        }
        let sum = spins.iter().map(|&s| s as i64).sum();
        Ok(Self {
            stored: spins,
            sum,
            flipped: false,
        })
    }

    pub fn all_plus(n: usize) -> Self {
        Self::with_sum(n, n as i64).unwrap()
    }

    pub fn all_minus(n: usize) -> Self {
        Self::with_sum(n, -(n as i64)).unwrap()
    }

    /// The first `(n + j) / 2` sites plus, the rest minus.
    pub fn with_sum(n: usize, j: i64) -> Result<Self> {
        if j.unsigned_abs() as usize > n || (n as i64 - j) % 2 != 0 {
            return Err(Error::InvalidParameter(format!("no configuration of {n} spins has sum {j}")));
        }
        let plus = ((n as i64 + j) / 2) as usize;
        Self::from_spins((0..n).map(|i| if i < plus { 1 } else { -1 }).collect())
    }

    /// Configuration with magnetization rounded up to the lattice.
    pub fn with_magnetization(n: usize, s: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&s) {
            return Err(Error::InvalidParameter(format!("magnetization {s} outside [-1, 1]")));
        }
        let mut j = (s * n as f64 - 1e-9).ceil() as i64;
        if (n as i64 - j) % 2 != 0 {
            j += 1;
        }
        Self::with_sum(n, j.min(n as i64))
    }

    pub fn n(&self) -> usize {
        self.stored.len()
    }

    pub fn sum(&self) -> i64 {
        self.sum
    }

    pub fn magnetization(&self) -> f64 {
        self.sum as f64 / self.n() as f64
    }

    #[inline]
    pub fn spin(&self, i: usize) -> i8 {
        if self.flipped {
            -self.stored[i]
        } else {
            self.stored[i]
        }
    }

    pub fn spins(&self) -> Vec<i8> {
        (0..self.n()).map(|i| self.spin(i)).collect()
    }

    pub fn flipped(&self) -> bool {
        self.flipped
    }

    pub(crate) fn stored(&self) -> &[i8] {
        &self.stored
    }

    /// Sum recomputed from the spins, for integrity checks.
    pub fn recompute_sum(&self) -> i64 {
        let raw: i64 = self.stored.iter().map(|&s| s as i64).sum();
        if self.flipped {
            -raw
        } else {
            raw
        }
    }

    /// First site where `self >= other` fails, if any.
    pub fn first_order_violation(&self, other: &SpinConfig) -> Option<usize> {
        (0..self.n()).find(|&i| self.spin(i) < other.spin(i))
    }

    /// Heat-bath update at `draw.site`, followed by a global negation when
    /// `censored` and the new sum is negative. Returns the stored value
    /// before and after the update at the site.
    #[inline]
    pub fn step(&mut self, draw: UpdateDraw, table: &FlipTable, censored: bool) -> (i8, i8) {
        let i = draw.site;
        let old_stored = self.stored[i];
        let old = self.spin(i) as i64;
        let others = self.sum - old;
        let new: i64 = if draw.u <= table.p_up(others) { 1 } else { -1 };
        let new_stored = if self.flipped { -new as i8 } else { new as i8 };
        self.stored[i] = new_stored;
        self.sum = others + new;
        if censored && self.sum < 0 {
            self.sum = -self.sum;
            self.flipped = !self.flipped;
        }
        (old_stored, new_stored)
    }
}

/// One step of the dynamics.
pub fn step(config: &mut SpinConfig, draw: UpdateDraw, table: &FlipTable, censored: bool) {
    config.step(draw, table, censored);
}

/// Agreement counts with a reference configuration `sigma0`:
/// `U = #{i : sigma(i) = sigma0(i) = +1}` and `V = #{i : sigma(i) = sigma0(i) = -1}`,
/// maintained in O(1) per step.
#[derive(Debug, Clone)]
pub struct AgreementCounter {
    reference: Vec<i8>,
    plus_total: usize,
    minus_total: usize,
    /// Counts against the stored (unflipped) spins.
    plus_stored: usize,
    minus_stored: usize,
}

impl AgreementCounter {
    pub fn new(reference: &SpinConfig, config: &SpinConfig) -> Self {
        let reference = reference.spins();
        let plus_total = reference.iter().filter(|&&s| s == 1).count();
        let minus_total = reference.len() - plus_total;
        let mut plus_stored = 0;
        let mut minus_stored = 0;
        for (r, s) in reference.iter().zip(config.stored()) {
            if *r == 1 && *s == 1 {
                plus_stored += 1;
            } else if *r == -1 && *s == -1 {
                minus_stored += 1;
            }
        }
        Self {
            reference,
            plus_total,
            minus_total,
            plus_stored,
            minus_stored,
        }
    }

    #[inline]
    pub fn record(&mut self, site: usize, old_stored: i8, new_stored: i8) {
        if old_stored == new_stored {
            return;
        }
        if self.reference[site] == 1 {
            if new_stored == 1 {
                self.plus_stored += 1;
            } else {
                self.plus_stored -= 1;
            }
        } else if new_stored == -1 {
            self.minus_stored += 1;
        } else {
            self.minus_stored -= 1;
        }
    }

    pub fn u(&self, config: &SpinConfig) -> usize {
        if config.flipped() {
            // flipped: actual +1 means stored -1
            self.plus_total - self.plus_stored
        } else {
            self.plus_stored
        }
    }

    pub fn v(&self, config: &SpinConfig) -> usize {
        if config.flipped() {
            self.minus_total - self.minus_stored
        } else {
            self.minus_stored
        }
    }

    /// `U(sigma0)` and `V(sigma0)`.
    pub fn totals(&self) -> (usize, usize) {
        (self.plus_total, self.minus_total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::rng::{draw, replica_rng};
    use proptest::prelude::*;

    fn table(n: usize, beta: f64) -> FlipTable {
        FlipTable::new(&ModelParams::new(n, beta).unwrap())
    }

    #[test]
    fn all_plus_stays_when_u_small() {
        let n = 20;
        let t = table(n, 1.2);
        let mut c = SpinConfig::all_plus(n);
        let p = p_plus(1.0 - 1.0 / n as f64, 1.2);
        c.step(UpdateDraw { site: 4, u: p }, &t, true);
        assert_eq!(c, SpinConfig::all_plus(n));
    }

    #[test]
    fn censored_negation_for_two_spins() {
        let t = table(2, 1.2);
        let mut c = SpinConfig::from_spins(vec![1, -1]).unwrap();
        // u close to 1 forces the updated spin to -1: sum -2, then negated
        c.step(UpdateDraw { site: 0, u: 0.999_999 }, &t, true);
        assert_eq!(c.spins(), vec![1, 1]);
        assert_eq!(c.sum(), 2);
    }

    #[test]
    fn ordinary_step_can_go_negative() {
        let t = table(2, 1.2);
        let mut c = SpinConfig::from_spins(vec![1, -1]).unwrap();
        c.step(UpdateDraw { site: 0, u: 0.999_999 }, &t, false);
        assert_eq!(c.spins(), vec![-1, -1]);
    }

    #[test]
    fn cached_sum_survives_a_long_censored_run() {
        let n = 101;
        let t = table(n, 1.3);
        let mut c = SpinConfig::with_sum(n, 1).unwrap();
        let mut rng = replica_rng(11, 0);
        for step in 0..1_000_000 {
            c.step(draw(&mut rng, n), &t, true);
            if step % 100_000 == 0 {
                assert!(c.sum() >= 0);
            }
        }
        assert_eq!(c.recompute_sum(), c.sum());
        assert!(c.sum() >= 0);
    }

    #[test]
    fn agreement_counts_track_recomputation() {
        let n = 64;
        let t = table(n, 1.1);
        let sigma0 = SpinConfig::with_sum(n, 0).unwrap();
        let mut c = SpinConfig::all_plus(n);
        let mut counter = AgreementCounter::new(&sigma0, &c);
        let mut rng = replica_rng(5, 2);
        for _ in 0..50_000 {
            let d = draw(&mut rng, n);
            let (old, new) = c.step(d, &t, true);
            counter.record(d.site, old, new);
            let spins = c.spins();
            let r = sigma0.spins();
            let u = (0..n).filter(|&i| spins[i] == 1 && r[i] == 1).count();
            let v = (0..n).filter(|&i| spins[i] == -1 && r[i] == -1).count();
            assert_eq!((counter.u(&c), counter.v(&c)), (u, v));
        }
    }

    #[test]
    fn rejects_bad_spins() {
        assert!(SpinConfig::from_spins(vec![1, 0, -1]).is_err());
        assert!(SpinConfig::with_sum(4, 1).is_err());
        assert!(SpinConfig::with_sum(4, 6).is_err());
    }

    #[test]
    fn magnetization_rounds_up() {
        assert_eq!(SpinConfig::with_magnetization(10, 0.05).unwrap().sum(), 2);
        assert_eq!(SpinConfig::with_magnetization(11, 0.0).unwrap().sum(), 1);
        assert_eq!(SpinConfig::with_magnetization(10, 0.0).unwrap().sum(), 0);
        assert_eq!(SpinConfig::with_magnetization(10, 1.0).unwrap().sum(), 10);
    }

    proptest! {
        #[test]
        fn censored_sum_stays_nonnegative(seed in any::<u64>(), n in 2usize..40, beta in 0.0f64..2.0) {
            let t = table(n, beta);
            let mut c = SpinConfig::with_sum(n, (n % 2) as i64).unwrap();
            let mut rng = replica_rng(seed, 0);
            for _ in 0..500 {
                c.step(draw(&mut rng, n), &t, true);
                prop_assert!(c.sum() >= 0);
                prop_assert_eq!(c.sum() % 2, (n % 2) as i64);
            }
            prop_assert_eq!(c.recompute_sum(), c.sum());
        }
    }
}
