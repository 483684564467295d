use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::dist::ProbVector;
use super::kernel::BirthDeathKernel;

/// Which end of the lattice a bottleneck cut is anchored to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutSide {
    /// `S = {0, ..., xi}`
    Lower,
    /// `S = {xi, ..., top}`
    Upper,
}

/// Weighted-graph view of a birth-and-death chain.
///
/// `c[i]` is the conductance of the edge `(i, i+1)` (zero at the top state),
/// normalized so that `c[0] = p_0 / p_0 = 1` before the global rescaling by
/// `exp(-log_scale)`. `c_self[i]` is the self-loop conductance.
#[derive(Debug, Clone, PartialEq)]
pub struct ConductanceProfile {
    pub c: Vec<f64>,
    pub c_self: Vec<f64>,
    /// `sum(c) + sum(c_self)`, in the same scaled units.
    pub c_total: f64,
    /// Every conductance above was multiplied by `exp(-log_scale)`.
    pub log_scale: f64,
    /// Stationary law read off the conductances:
    /// `pi(i) = (c[i-1] + c[i] + c_self[i]) / z`.
    pub pi: Vec<f64>,
    /// `z / c_total`, where `z = 2 sum(c) + sum(c_self)` normalizes `pi`.
    pub normalizer_ratio: f64,
    pub phi_star: f64,
    /// Index of `xi` in the minimizing cut.
    pub phi_star_cut: usize,
    pub phi_star_side: CutSide,
}

impl ConductanceProfile {
    /// Edge measure `Q(i, i+1) = pi(i) p_i` from the conductances.
    pub fn edge_flow(&self, i: usize) -> f64 {
        self.c[i] / self.z()
    }

    fn z(&self) -> f64 {
        self.c_total * self.normalizer_ratio
    }

    /// `Q(S, S^c)` for an endpoint-anchored cut.
    pub fn cut_flow(&self, side: CutSide, xi: usize) -> f64 {
        match side {
            CutSide::Lower => self.edge_flow(xi),
            CutSide::Upper if xi == 0 => 0.0,
            CutSide::Upper => self.edge_flow(xi - 1),
        }
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

pub fn conductance_profile(kernel: &BirthDeathKernel) -> Result<ConductanceProfile> {
    let lattice = kernel.lattice();
    let (p, q, h) = (kernel.p(), kernel.q(), kernel.h());
    let len = kernel.len();
    if len < 2 {
        return Err(Error::InvalidParameter("lattice has a single state".into()));
    }

    let mut log_c = vec![f64::NEG_INFINITY; len];
    log_c[0] = 0.0;
    for i in 1..len - 1 {
        if p[i] <= 0.0 || q[i] <= 0.0 {
            return Err(Error::Reducible {
                from: lattice.j(i),
                to: lattice.j(if p[i] <= 0.0 { i + 1 } else { i - 1 }),
            });
        }
        log_c[i] = log_c[i - 1] + p[i].ln() - q[i].ln();
        if !log_c[i].is_finite() {
            return Err(Error::NumericOverflow { state: lattice.j(i) });
        }
    }
    if p[0] <= 0.0 {
        return Err(Error::Reducible {
            from: lattice.j(0),
            to: lattice.j(1),
        });
    }

    let mut log_self = vec![f64::NEG_INFINITY; len];
    for i in 0..len {
        let left = if i > 0 { log_c[i - 1] } else { f64::NEG_INFINITY };
        if h[i] > 0.0 {
            log_self[i] = h[i].ln() - (p[i] + q[i]).ln() + log_add(left, log_c[i]);
        }
        if log_self[i].is_nan() || log_self[i] == f64::INFINITY {
            return Err(Error::NumericOverflow { state: lattice.j(i) });
        }
    }

    let log_scale = log_c
        .iter()
        .chain(&log_self)
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let c: Vec<f64> = log_c.iter().map(|l| (l - log_scale).exp()).collect();
    let c_self: Vec<f64> = log_self.iter().map(|l| (l - log_scale).exp()).collect();
    let sum_c: f64 = c.iter().sum();
    let sum_self: f64 = c_self.iter().sum();
    let c_total = sum_c + sum_self;
    if !(c_total.is_finite() && c_total > 0.0) {
        return Err(Error::NumericOverflow { state: lattice.j(0) });
    }

    let log_z = (2.0 * sum_c + sum_self).ln();
    let log_pi: Vec<f64> = (0..len)
        .map(|i| {
            let left = if i > 0 { log_c[i - 1] } else { f64::NEG_INFINITY };
            log_add(log_add(left, log_c[i]), log_self[i]) - log_scale - log_z
        })
        .collect();
    let pi: Vec<f64> = log_pi.iter().map(|l| l.exp()).collect();

    // Cut masses are accumulated from each end separately and kept in
    // log-space: 1 - prefix loses all precision once the far tail drops below
    // machine epsilon, and the tails themselves underflow at large n.
    let mut log_prefix = vec![f64::NEG_INFINITY; len];
    let mut acc = f64::NEG_INFINITY;
    for i in 0..len {
        acc = log_add(acc, log_pi[i]);
        log_prefix[i] = acc;
    }
    let mut log_suffix = vec![f64::NEG_INFINITY; len];
    acc = f64::NEG_INFINITY;
    for i in (0..len).rev() {
        acc = log_add(acc, log_pi[i]);
        log_suffix[i] = acc;
    }

    let half = 0.5f64.ln();
    let mut best = (f64::INFINITY, 0, CutSide::Lower);
    for xi in 0..len - 1 {
        if log_prefix[xi] <= half {
            let phi = (log_c[xi] - log_scale - log_z - log_prefix[xi]).exp();
            if phi < best.0 {
                best = (phi, xi, CutSide::Lower);
            }
        }
    }
    for xi in 1..len {
        if log_suffix[xi] <= half {
            let phi = (log_c[xi - 1] - log_scale - log_z - log_suffix[xi]).exp();
            if phi < best.0 {
                best = (phi, xi, CutSide::Upper);
            }
        }
    }

    Ok(ConductanceProfile {
        c,
        c_self,
        c_total,
        log_scale,
        pi,
        normalizer_ratio: (2.0 * sum_c + sum_self) / c_total,
        phi_star: best.0,
        phi_star_cut: best.1,
        phi_star_side: best.2,
    })
}

/// `Q(S, S^c) = sum_{x in S, y not in S} pi(x) P(x, y)` for an arbitrary set,
/// given as a membership mask.
pub fn edge_measure(pi: &ProbVector, kernel: &BirthDeathKernel, in_set: &[bool]) -> f64 {
    let m = pi.mass();
    let mut flow = 0.0;
    for i in 0..kernel.len() {
        if !in_set[i] {
            continue;
        }
        if i + 1 < kernel.len() && !in_set[i + 1] {
            flow += m[i] * kernel.p()[i];
        }
        if i > 0 && !in_set[i - 1] {
            flow += m[i] * kernel.q()[i];
        }
    }
    flow
}
