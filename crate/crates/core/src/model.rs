//! Model constants, flip probabilities and the closed-form cutoff schedule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances;

/// Parameters of the Curie-Weiss model at inverse temperature `beta` on `n`
/// spins. `zeta` is present only above the critical point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: usize,
    pub beta: f64,
    pub delta: f64,
    pub zeta: Option<f64>,
}

impl ModelParams {
    pub fn new(n: usize, beta: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("n must be >= 2, got {n}")));
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "beta must be finite and >= 0, got {beta}"
            )));
        }
        let zeta = if beta > 1.0 {
            Some(solve_zeta(beta, tolerances::ZETA_RESIDUAL)?)
        } else {
            None
        };
        Ok(Self {
            n,
            beta,
            delta: beta - 1.0,
            zeta,
        })
    }

    /// The positive root, or `NoPositiveRoot` at or below criticality.
    pub fn zeta(&self) -> Result<f64> {
        self.zeta.ok_or(Error::NoPositiveRoot { beta: self.beta })
    }

    pub fn delta_sq_n(&self) -> f64 {
        self.delta * self.delta * self.n as f64
    }

    /// Natural time unit n/delta (the cutoff window order).
    pub fn window_unit(&self) -> f64 {
        self.n as f64 / self.delta
    }
}

/// Probability that a resampled spin becomes +1 given the magnetization `s`
/// of the other spins: `(1 + tanh(beta s)) / 2`.
///
/// Evaluated in logistic form, which avoids the cancellation in `1 + tanh`
/// for large negative arguments.
#[inline]
pub fn p_plus(s: f64, beta: f64) -> f64 {
    1.0 / (1.0 + (-2.0 * beta * s).exp())
}

#[inline]
pub fn p_minus(s: f64, beta: f64) -> f64 {
    1.0 / (1.0 + (2.0 * beta * s).exp())
}

/// Positive root of `tanh(beta x) = x` for `beta > 1`.
///
/// Bisection on `(1e-12, 1]` brackets the root (g > 0 left of it, g < 0 at 1),
/// then a few Newton steps polish the residual below `tol` where possible.
pub fn solve_zeta(beta: f64, tol: f64) -> Result<f64> {
    if !(beta > 1.0) || !beta.is_finite() {
        return Err(Error::NoPositiveRoot { beta });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be > 0, got {tol}")));
    }
    let g = |x: f64| (beta * x).tanh() - x;
    let (mut lo, mut hi) = (1e-12_f64, 1.0_f64);
    // g(lo) > 0 requires beta*lo - lo > O(lo^3), true for any beta > 1 + 1e-20.
    if g(lo) <= 0.0 {
        return Err(Error::NoPositiveRoot { beta });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..8 {
        let t = (beta * x).tanh();
        let dg = beta * (1.0 - t * t) - 1.0;
        if dg == 0.0 {
            break;
        }
        let next = x - (t - x) / dg;
        if !(next > 0.0 && next <= 1.0) {
            break;
        }
        let done = (next - x).abs() < f64::EPSILON * x;
        x = next;
        if done {
            break;
        }
    }
    Ok(x)
}

/// Closed-form step counts of the cutoff analysis. All times are reals;
/// callers round up with [`CutoffSchedule::steps`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSchedule {
    /// Reaching n^{-1/4} from 0.
    pub t1: f64,
    /// Reaching sqrt(delta) from n^{-1/4}.
    pub t2: f64,
    /// Reaching zeta from (4/3) sqrt(delta).
    pub t3: f64,
    /// Reaching zeta from 1.
    pub t4: f64,
    pub t_total: f64,
    /// Cutoff point for the worst starting state.
    pub t_n_worst: f64,
    /// Cutoff point from the all-plus configuration.
    pub t_n_plus: f64,
    pub window_unit: f64,
}

impl CutoffSchedule {
    /// `t_total + gamma * n / delta`.
    pub fn t_plus(&self, gamma: f64) -> f64 {
        self.t_total + gamma * self.window_unit
    }

    pub fn t_minus(&self, gamma: f64) -> f64 {
        self.t_total - gamma * self.window_unit
    }

    /// `t3 + gamma * n / delta`.
    pub fn t3_plus(&self, gamma: f64) -> f64 {
        self.t3 + gamma * self.window_unit
    }

    /// Integer step count for a schedule time (ceiling).
    pub fn steps(t: f64) -> u64 {
        if t <= 0.0 {
            0
        } else {
            t.ceil() as u64
        }
    }
}

/// `[2(zeta^2 beta / delta - 1)]^{-1}`, the all-plus cutoff constant.
pub fn plus_constant(beta: f64, zeta: f64) -> f64 {
    let delta = beta - 1.0;
    1.0 / (2.0 * (zeta * zeta * beta / delta - 1.0))
}

/// `1/2 + [2(zeta^2 beta / delta - 1)]^{-1}`, the worst-start cutoff constant.
pub fn worst_constant(beta: f64, zeta: f64) -> f64 {
    0.5 + plus_constant(beta, zeta)
}

pub fn cutoff_schedule(params: &ModelParams) -> Result<CutoffSchedule> {
    let zeta = params.zeta()?;
    let dsn = params.delta_sq_n();
    if dsn <= 1.0 {
        return Err(Error::OutsideRegime { value: dsn });
    }
    let unit = params.window_unit();
    let log_term = dsn.ln();
    let plus = plus_constant(params.beta, zeta);
    let t1 = 0.25 * unit * log_term;
    let t3 = plus * unit * log_term;
    Ok(CutoffSchedule {
        t1,
        t2: t1,
        t3,
        t4: t3,
        t_total: t1 + t1 + t3,
        t_n_worst: worst_constant(params.beta, zeta) * unit * log_term,
        t_n_plus: t3,
        window_unit: unit,
    })
}
