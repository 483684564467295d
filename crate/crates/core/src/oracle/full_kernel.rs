use crate::error::{Error, Result};
use crate::tolerances;

use super::gibbs::project;
use super::space::ConfigSpace;

/// Exact heat-bath kernel on enumerated configurations, stored by rows as
/// `(column, probability)` pairs (each row has at most `n + 1` entries).
#[derive(Debug, Clone, PartialEq)]
pub struct FullKernel {
    pub n: usize,
    pub beta: f64,
    pub space: ConfigSpace,
    pub rows: Vec<Vec<(usize, f64)>>,
}

fn heat_bath_plus(x: f64, beta: f64) -> f64 {
    0.5 * (1.0 + (beta * x).tanh())
}

pub fn full_kernel(n: usize, beta: f64, censored: bool) -> Result<FullKernel> {
    let space = ConfigSpace::new(n, censored)?;
    let nf = n as f64;
    let mut rows = Vec::with_capacity(space.len());
    for idx in 0..space.len() {
        let mask = space.mask(idx);
        let total = space.sum_of(mask);
        let mut row: Vec<(usize, f64)> = Vec::with_capacity(n + 1);
        let mut add = |target: u32, prob: f64| {
            let target = if censored && space.sum_of(target) < 0 {
                space.negate(target)
            } else {
                target
            };
            let col = space.index_of(target).unwrap();
            match row.iter_mut().find(|(c, _)| *c == col) {
                Some(entry) => entry.1 += prob,
                None => row.push((col, prob)),
            }
        };
        for site in 0..n {
            let own = if mask >> site & 1 == 1 { 1 } else { -1 };
            let others = (total - own) as f64 / nf;
            let up = heat_bath_plus(others, beta);
            add(mask | 1 << site, up / nf);
            add(mask & !(1 << site), (1.0 - up) / nf);
        }
        row.sort_by_key(|e| e.0);
        rows.push(row);
    }
    Ok(FullKernel { n, beta, space, rows })
}

impl FullKernel {
    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn entry(&self, from: usize, to: usize) -> f64 {
        self.rows[from].iter().find(|e| e.0 == to).map_or(0.0, |e| e.1)
    }

    pub fn max_row_sum_error(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.iter().map(|e| e.1).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `dist * P`
    pub fn apply(&self, dist: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, p) in row {
                out[j] += dist[i] * p;
            }
        }
        out
    }

    pub fn evolve(&self, dist: &[f64], steps: u64) -> Vec<f64> {
        let mut cur = dist.to_vec();
        for _ in 0..steps {
            cur = self.apply(&cur);
        }
        cur
    }

    /// Stationary law by power iteration from the uniform law.
    pub fn power_stationary(&self, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
        let mut cur = vec![1.0 / self.len() as f64; self.len()];
        for _ in 0..max_iter {
            let next = self.apply(&cur);
            let change = next.iter().zip(&cur).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            cur = next;
            if change <= tol {
                let total: f64 = cur.iter().sum();
                return Ok(cur.iter().map(|m| m / total).collect());
            }
        }
        Err(Error::NoConvergence {
            iterations: max_iter as u64,
            residual: f64::NAN,
        })
    }

    /// Spin-sum levels present in the space, ascending.
    pub fn levels(&self) -> Vec<i64> {
        let n = self.n as i64;
        let lo = if self.space.censored() { n % 2 } else { -n };
        (0..=(n - lo) / 2).map(|k| lo + 2 * k).collect()
    }

    fn level_index(&self, sum: i64) -> usize {
        let lo = self.levels()[0];
        ((sum - lo) / 2) as usize
    }

    /// `P(sigma, Omega_k)` for every state and level.
    pub fn level_flows(&self) -> Vec<Vec<f64>> {
        let levels = self.levels().len();
        self.rows
            .iter()
            .map(|row| {
                let mut flow = vec![0.0; levels];
                for &(j, p) in row {
                    flow[self.level_index(self.space.sum(j))] += p;
                }
                flow
            })
            .collect()
    }

    /// Largest discrepancy of `P(sigma, Omega_k)` between states on the same
    /// level; zero for a strong lumping.
    pub fn lumping_defect(&self) -> f64 {
        let flows = self.level_flows();
        let levels = self.levels().len();
        let mut first: Vec<Option<usize>> = vec![None; levels];
        let mut worst: f64 = 0.0;
        for i in 0..self.len() {
            let l = self.level_index(self.space.sum(i));
            match first[l] {
                None => first[l] = Some(i),
                Some(r) => {
                    for k in 0..levels {
                        worst = worst.max((flows[i][k] - flows[r][k]).abs());
                    }
                }
            }
        }
        worst
    }

    /// Kernel of the spin sum, read from one representative per level.
    pub fn lumped(&self) -> Vec<Vec<f64>> {
        let flows = self.level_flows();
        let levels = self.levels().len();
        let mut out = vec![Vec::new(); levels];
        for i in 0..self.len() {
            let l = self.level_index(self.space.sum(i));
            if out[l].is_empty() {
                out[l] = flows[i].clone();
            }
        }
        out
    }

    /// Total-variation distance to `target` of the law started at state
    /// `start`, for `t = 0..=steps`.
    pub fn tv_curve(&self, start: usize, target: &[f64], steps: u64) -> Vec<f64> {
        let mut cur = vec![0.0; self.len()];
        cur[start] = 1.0;
        let mut out = Vec::with_capacity(steps as usize + 1);
        for t in 0..=steps {
            if t > 0 {
                cur = self.apply(&cur);
            }
            out.push(0.5 * cur.iter().zip(target).map(|(a, b)| (a - b).abs()).sum::<f64>());
        }
        out
    }

    /// Magnetization law after `steps` from the state `start`.
    pub fn projected_law(&self, start: usize, steps: u64) -> Vec<f64> {
        let mut cur = vec![0.0; self.len()];
        cur[start] = 1.0;
        project(&self.space, &self.evolve(&cur, steps))
    }

    /// `max |mu(x) P(x, y) - mu(y) P(y, x)|`.
    pub fn detailed_balance_residual(&self, mu: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, p) in row {
                worst = worst.max((mu[i] * p - mu[j] * self.entry(j, i)).abs());
            }
        }
        worst
    }

    pub fn check_rows(&self) -> Result<()> {
        let err = self.max_row_sum_error();
        if err > tolerances::FULL_KERNEL_ROW_SUM {
            return Err(Error::InvalidParameter(format!("row sum error {err:e}")));
        }
        Ok(())
    }
}
