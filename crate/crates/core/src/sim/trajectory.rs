use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::model::ModelParams;

use super::rng::draw;
use super::spins::{FlipTable, SpinConfig};

/// Direction in which a threshold is approached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Up,
    Down,
}

/// A magnetization threshold snapped to the lattice of spin sums:
/// rounded up for upward crossings, down for downward ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub label: String,
    pub value: f64,
    pub direction: Direction,
    /// Spin sum the crossing is tested against.
    pub target_sum: i64,
}

impl Threshold {
    pub fn new(label: impl Into<String>, value: f64, direction: Direction, n: usize) -> Self {
        Self {
            label: label.into(),
            value,
            direction,
            target_sum: lattice_sum(value, direction, n),
        }
    }

    #[inline]
    pub fn reached(&self, sum: i64) -> bool {
        match self.direction {
            Direction::Up => sum >= self.target_sum,
            Direction::Down => sum <= self.target_sum,
        }
    }

    pub fn lattice_value(&self, n: usize) -> f64 {
        self.target_sum as f64 / n as f64
    }
}

/// Nearest spin sum of the right parity at or above (`Up`) or at or below
/// (`Down`) `value * n`.
pub fn lattice_sum(value: f64, direction: Direction, n: usize) -> i64 {
    let n_i = n as i64;
    let x = value * n as f64;
    let mut j = match direction {
        Direction::Up => (x - 1e-9).ceil() as i64,
        Direction::Down => (x + 1e-9).floor() as i64,
    };
    if (n_i - j).rem_euclid(2) != 0 {
        j += if direction == Direction::Up { 1 } else { -1 };
    }
    j.clamp(-n_i, n_i)
}

/// The three reference thresholds of the upward trajectory from 0:
/// `n^{-1/4}`, `(4/3) sqrt(delta)` and `zeta` (the last two only above
/// criticality), in that order.
pub fn standard_thresholds(params: &ModelParams) -> Vec<Threshold> {
    let n = params.n;
    let mut out = vec![Threshold::new("n^-1/4", (n as f64).powf(-0.25), Direction::Up, n)];
    if let Some(zeta) = params.zeta {
        out.push(Threshold::new("4/3 sqrt(delta)", 4.0 / 3.0 * params.delta.sqrt(), Direction::Up, n));
        out.push(Threshold::new("zeta", zeta, Direction::Up, n));
    }
    out
}

/// What to keep from a run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RecordSpec {
    /// Record the magnetization every `every` steps (0 disables the series).
    pub every: u64,
    pub thresholds: Vec<Threshold>,
    /// Stop as soon as every threshold has been crossed.
    pub stop_when_crossed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Crossing {
    pub threshold: Threshold,
    pub time: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub times: Vec<u64>,
    pub magnetization: Vec<f64>,
    pub crossings: Vec<Crossing>,
    pub steps_run: u64,
    pub final_config: SpinConfig,
}

impl TrajectoryRecord {
    /// Crossing times in threshold order; `None` if one was never crossed.
    pub fn crossing_times(&self) -> Option<Vec<u64>> {
        self.crossings.iter().map(|c| c.time).collect()
    }
}

/// Run the dynamics for `steps` updates drawn from `rng`.
pub fn run<R: Rng + ?Sized>(
    config0: &SpinConfig,
    params: &ModelParams,
    steps: u64,
    rng: &mut R,
    censored: bool,
    spec: &RecordSpec,
) -> TrajectoryRecord {
    let n = config0.n();
    let table = FlipTable::new(params);
    let mut config = config0.clone();
    let mut crossings: Vec<Crossing> = spec
        .thresholds
        .iter()
        .map(|th| Crossing {
            threshold: th.clone(),
            time: th.reached(config.sum()).then_some(0),
        })
        .collect();
    let mut pending = crossings.iter().filter(|c| c.time.is_none()).count();
    let mut times = Vec::new();
    let mut magnetization = Vec::new();
    if spec.every > 0 {
        times.push(0);
        magnetization.push(config.magnetization());
    }
    let mut t = 0;
    while t < steps {
        if spec.stop_when_crossed && pending == 0 && !crossings.is_empty() {
            break;
        }
        config.step(draw(rng, n), &table, censored);
        t += 1;
        if pending > 0 {
            for c in crossings.iter_mut().filter(|c| c.time.is_none()) {
                if c.threshold.reached(config.sum()) {
                    c.time = Some(t);
                    pending -= 1;
                }
            }
        }
        if spec.every > 0 && t % spec.every == 0 {
            times.push(t);
            magnetization.push(config.magnetization());
        }
    }
    TrajectoryRecord {
        times,
        magnetization,
        crossings,
        steps_run: t,
        final_config: config,
    }
}
