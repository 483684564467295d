use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::ModelParams;

use super::dist::{stationary, tv_distance, ProbVector, Stepper};
use super::kernel::{build_kernel, BirthDeathKernel};
use super::lattice::Start;

/// Which distance curve of a profile to read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    /// Maximum over all starts in the profile.
    Worst,
    /// The start at this position in [`TvProfile::starts`].
    Start(usize),
}

/// Distance to stationarity `d_x(t)` for a set of starts on a time grid,
/// with cached laws for refining crossings between grid points.
#[derive(Debug, Clone)]
pub struct TvProfile {
    pub params: ModelParams,
    pub censored: bool,
    pub starts: Vec<Start>,
    /// Sorted, deduplicated, always begins with 0.
    pub times: Vec<u64>,
    /// `d[start][time index]`
    pub d: Vec<Vec<f64>>,
    kernel: BirthDeathKernel,
    pi: ProbVector,
    snapshot_stride: u64,
    /// `snapshots[start][m]` is the law at time `m * snapshot_stride`.
    snapshots: Vec<Vec<ProbVector>>,
}

impl TvProfile {
    pub fn kernel(&self) -> &BirthDeathKernel {
        &self.kernel
    }

    pub fn stationary(&self) -> &ProbVector {
        &self.pi
    }

    pub fn snapshot_stride(&self) -> u64 {
        self.snapshot_stride
    }

    pub fn column(&self, col: Column) -> Vec<f64> {
        match col {
            Column::Start(i) => self.d[i].clone(),
            Column::Worst => (0..self.times.len())
                .map(|k| self.d.iter().map(|c| c[k]).fold(0.0, f64::max))
                .collect(),
        }
    }

    pub fn horizon(&self) -> u64 {
        *self.times.last().unwrap()
    }

    /// Exact law from start `i` at time `t`, evolved from the nearest cached
    /// snapshot at or before `t`.
    pub fn law_at(&self, i: usize, t: u64) -> ProbVector {
        let m = ((t / self.snapshot_stride) as usize).min(self.snapshots[i].len() - 1);
        let mut law = self.snapshots[i][m].clone();
        Stepper::new(&self.kernel).advance(&mut law, t - m as u64 * self.snapshot_stride);
        law
    }

    fn columns(&self, col: Column) -> Vec<usize> {
        match col {
            Column::Worst => (0..self.starts.len()).collect(),
            Column::Start(i) => vec![i],
        }
    }
}

/// Steps between cached laws: `ceil(n / delta)` above criticality, `n` otherwise.
pub fn snapshot_stride(params: &ModelParams) -> u64 {
    if params.delta > 0.0 {
        params.window_unit().ceil().max(1.0) as u64
    } else {
        params.n as u64
    }
}

pub fn tv_profile(params: &ModelParams, censored: bool, starts: &[Start], t_grid: &[u64]) -> Result<TvProfile> {
    if starts.is_empty() {
        return Err(Error::InvalidParameter("no start states".into()));
    }
    let kernel = build_kernel(params, censored);
    let pi = stationary(&kernel)?;
    let lattice = *kernel.lattice();
    let indices = starts.iter().map(|s| s.resolve(&lattice)).collect::<Result<Vec<_>>>()?;

    let mut times: Vec<u64> = std::iter::once(0).chain(t_grid.iter().copied()).collect();
    times.sort_unstable();
    times.dedup();
    let stride = snapshot_stride(params);

    let runs: Vec<(Vec<f64>, Vec<ProbVector>)> = indices
        .par_iter()
        .map(|&start| {
            let mut stepper = Stepper::new(&kernel);
            let mut law = ProbVector::point(lattice, start);
            let mut snaps = vec![law.clone()];
            let mut d = Vec::with_capacity(times.len());
            let mut now = 0u64;
            for &t in &times {
                while now < t {
                    let next_snap = (now / stride + 1) * stride;
                    let target = t.min(next_snap);
                    stepper.advance(&mut law, target - now);
                    now = target;
                    if now == next_snap {
                        snaps.push(law.clone());
                    }
                }
                d.push(tv_distance(&law, &pi));
            }
            (d, snaps)
        })
        .collect();
    let (d, snapshots) = runs.into_iter().unzip();

    Ok(TvProfile {
        params: *params,
        censored,
        starts: starts.to_vec(),
        times,
        d,
        kernel,
        pi,
        snapshot_stride: stride,
        snapshots,
    })
}

/// Smallest `t` with `d(t) <= epsilon` for the chosen column.
///
/// Finds the first grid point below `epsilon`, then bisects between it and
/// its predecessor. The lower end of the bracket always carries its exact
/// law, so the refinement costs at most twice the bracket length in steps.
pub fn t_mix(profile: &TvProfile, epsilon: f64, col: Column) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} outside (0, 1)")));
    }
    let curve = profile.column(col);
    let k = curve
        .iter()
        .position(|&d| d <= epsilon)
        .ok_or(Error::NeedLargerHorizon {
            epsilon,
            horizon: profile.horizon(),
        })?;
    if k == 0 {
        return Ok(0);
    }
    let (mut lo, mut hi) = (profile.times[k - 1], profile.times[k]);
    let cols = profile.columns(col);
    let mut laws: Vec<ProbVector> = cols.iter().map(|&i| profile.law_at(i, lo)).collect();
    let mut stepper = Stepper::new(&profile.kernel);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let mut trial = laws.clone();
        let mut worst: f64 = 0.0;
        for law in trial.iter_mut() {
            stepper.advance(law, mid - lo);
            worst = worst.max(tv_distance(law, &profile.pi));
        }
        if worst <= epsilon {
            hi = mid;
        } else {
            lo = mid;
            laws = trial;
        }
    }
    Ok(hi)
}

/// Evenly spaced grid `0, step, 2 step, ..., >= horizon`.
pub fn uniform_grid(step: u64, horizon: u64) -> Vec<u64> {
    let step = step.max(1);
    (0..=horizon.div_ceil(step)).map(|k| k * step).collect()
}

/// Mixing times for several thresholds from one profile whose horizon is
/// doubled until every crossing is bracketed (up to `max_horizon`).
pub fn mixing_times(
    params: &ModelParams,
    censored: bool,
    starts: &[Start],
    epsilons: &[f64],
    col: Column,
    initial_horizon: u64,
    max_horizon: u64,
) -> Result<(TvProfile, Vec<u64>)> {
    let step = snapshot_stride(params);
    let mut horizon = initial_horizon.max(step);
    loop {
        let profile = tv_profile(params, censored, starts, &uniform_grid(step, horizon))?;
        let result: Result<Vec<u64>> = epsilons.iter().map(|&e| t_mix(&profile, e, col)).collect();
        match result {
            Err(Error::NeedLargerHorizon { .. }) if horizon < max_horizon => {
                horizon = (horizon * 2).min(max_horizon);
            }
            other => return other.map(|t| (profile, t)),
        }
    }
}
