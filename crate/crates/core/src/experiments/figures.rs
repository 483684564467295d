use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::mixing::{mixing_times, uniform_grid};
use crate::chain::{build_kernel, stationary, tv_profile, Column, ProbVector, Start};
use crate::error::Result;
use crate::model::{cutoff_schedule, ModelParams};

use super::row::{sort_rows, write_outputs, ResultRow, Sidecar};
use super::runner::{compute_rows, default_sim_steps, start_config};
use super::spec::{ExperimentSpec, Kind};
use crate::sim::{replica_rng, run, standard_thresholds, RecordSpec};

pub const REFERENCE_N: [usize; 5] = [256, 512, 1024, 2048, 4096];
pub const REFERENCE_BETA: f64 = 1.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Figure {
    Fig1,
    Fig2,
    CutoffProfile,
    GapScaling,
    WindowScaling,
}

impl Figure {
    pub fn name(&self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::CutoffProfile => "cutoff-profile",
            Figure::GapScaling => "gap-scaling",
            Figure::WindowScaling => "window-scaling",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureOptions {
    pub figure: Figure,
    /// fig1 temperature offset.
    pub delta: f64,
    /// fig1 system size.
    pub fig1_n: usize,
    pub seed: u64,
    /// Sizes of the scaling sweeps.
    pub n: Vec<usize>,
    pub beta: f64,
}

impl FigureOptions {
    pub fn new(figure: Figure) -> Self {
        Self {
            figure,
            delta: 0.1,
            fig1_n: 500,
            seed: 1,
            n: REFERENCE_N.to_vec(),
            beta: REFERENCE_BETA,
        }
    }
}

/// Linear interpolation of a lattice law at `x`, zero outside its range.
fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let k = xs.partition_point(|&v| v <= x);
    if k == 0 || k == xs.len() {
        return if xs.last() == Some(&x) { ys[ys.len() - 1] } else { 0.0 };
    }
    let (x0, x1) = (xs[k - 1], xs[k]);
    let w = (x - x0) / (x1 - x0);
    ys[k - 1] * (1.0 - w) + ys[k] * w
}

fn law(params: &ModelParams, censored: bool) -> Result<(Vec<f64>, ProbVector)> {
    let k = build_kernel(params, censored);
    Ok((k.lattice().s_values(), stationary(&k)?))
}

/// Largest pointwise difference between the ordinary law at `1 - delta` and
/// the censored law at `1 + delta` shifted by `zeta`, on the ordinary lattice.
pub fn overlay_gap(n: usize, delta: f64) -> Result<f64> {
    let (xs, low) = law(&ModelParams::new(n, 1.0 - delta)?, false)?;
    let high = ModelParams::new(n, 1.0 + delta)?;
    let zeta = high.zeta()?;
    let (cs, cens) = law(&high, true)?;
    let shifted: Vec<f64> = cs.iter().map(|s| s - zeta).collect();
    Ok(xs
        .iter()
        .zip(low.mass())
        .map(|(&x, &p)| (p - interpolate(&shifted, cens.mass(), x)).abs())
        .fold(0.0, f64::max))
}

fn law_rows(label: &str, params: &ModelParams, censored: bool, shift: f64) -> Result<Vec<ResultRow>> {
    let (xs, pi) = law(params, censored)?;
    Ok(xs
        .iter()
        .zip(pi.mass())
        .map(|(&s, &p)| ResultRow {
            s: Some(s - shift),
            prob: Some(p),
            ..ResultRow::for_params("fig1", label, params, censored)
        })
        .collect())
}

pub fn fig1(opts: &FigureOptions) -> Result<Vec<ResultRow>> {
    let n = opts.fig1_n;
    let low = ModelParams::new(n, 1.0 - opts.delta)?;
    let high = ModelParams::new(n, 1.0 + opts.delta)?;
    let mut rows = law_rows("ordinary beta=1-delta", &low, false, 0.0)?;
    rows.extend(law_rows("ordinary beta=1+delta", &high, false, 0.0)?);
    rows.extend(law_rows("censored beta=1+delta shifted by zeta", &high, true, high.zeta()?)?);
    for scale in [1.0, 0.5, 0.25] {
        let d = opts.delta * scale;
        rows.push(ResultRow {
            kind: "fig1".into(),
            label: "overlay-max-gap".into(),
            n: Some(n),
            delta: Some(d),
            value: Some(overlay_gap(n, d)?),
            ..Default::default()
        });
    }
    Ok(rows)
}

pub fn fig2(opts: &FigureOptions) -> Result<Vec<ResultRow>> {
    let params = ModelParams::new(50_000, 1.25)?;
    let start = Start::Value(0.0);
    let record = RecordSpec {
        every: params.n as u64 / 10,
        thresholds: standard_thresholds(&params),
        stop_when_crossed: false,
    };
    let rec = run(
        &start_config(start, params.n)?,
        &params,
        default_sim_steps(&params),
        &mut replica_rng(opts.seed, 0),
        true,
        &record,
    );
    let base = |label: &str| ResultRow {
        start: Some(start.label()),
        seed: Some(opts.seed),
        replica: Some(0),
        ..ResultRow::for_params("fig2", label, &params, true)
    };
    let mut rows: Vec<ResultRow> = rec
        .times
        .iter()
        .zip(&rec.magnetization)
        .map(|(&t, &s)| ResultRow {
            t: Some(t),
            s: Some(s),
            ..base("trajectory")
        })
        .collect();
    for c in &rec.crossings {
        rows.push(ResultRow {
            tau: c.time,
            value: Some(c.threshold.value),
            ..base(&format!("crossing:{}", c.threshold.label))
        });
    }
    Ok(rows)
}

/// Worst-start distance curves on a 200-point grid up to twice the cutoff
/// time, with `value = t / t_n_worst`.
pub fn cutoff_profile(opts: &FigureOptions) -> Result<Vec<ResultRow>> {
    let chunks: Result<Vec<Vec<ResultRow>>> = opts
        .n
        .par_iter()
        .map(|&n| {
            let params = ModelParams::new(n, opts.beta)?;
            let t_n = cutoff_schedule(&params)?.t_n_worst;
            let horizon = (2.0 * t_n).ceil() as u64;
            let grid = uniform_grid(horizon.div_ceil(200), horizon);
            let prof = tv_profile(&params, true, &[Start::Bottom, Start::Top], &grid)?;
            Ok(prof
                .times
                .iter()
                .zip(prof.column(Column::Worst))
                .map(|(&t, d)| ResultRow {
                    start: Some("worst".into()),
                    t: Some(t),
                    d_tv: Some(d),
                    value: Some(t as f64 / t_n),
                    ..ResultRow::for_params("cutoff-profile", "t/t_n_worst", &params, true)
                })
                .collect())
        })
        .collect();
    Ok(chunks?.into_iter().flatten().collect())
}

pub fn gap_scaling(opts: &FigureOptions) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for kind in [Kind::Gap, Kind::Conductance] {
        let mut spec = ExperimentSpec::new(kind);
        spec.n = opts.n.clone();
        spec.beta = vec![opts.beta];
        rows.extend(compute_rows(&spec)?);
    }
    Ok(rows)
}

/// Worst-start mixing times at 0.05, 0.25 and 0.95, and the window
/// `t_mix(0.05) - t_mix(0.95)` in units of `n/delta` and of `t_mix(1/4)`.
pub fn window_scaling(opts: &FigureOptions) -> Result<Vec<ResultRow>> {
    let eps = [0.05, 0.25, 0.95];
    let chunks: Result<Vec<Vec<ResultRow>>> = opts
        .n
        .par_iter()
        .map(|&n| {
            let params = ModelParams::new(n, opts.beta)?;
            let sched = cutoff_schedule(&params)?;
            let initial = (2.0 * sched.t_n_worst).ceil() as u64;
            let (_, t) =
                mixing_times(&params, true, &[Start::Bottom, Start::Top], &eps, Column::Worst, initial, 64 * initial)?;
            let base = |label: &str| ResultRow {
                start: Some("worst".into()),
                ..ResultRow::for_params("window-scaling", label, &params, true)
            };
            let mut rows: Vec<ResultRow> = eps
                .iter()
                .zip(&t)
                .map(|(&e, &tm)| ResultRow {
                    t: Some(tm),
                    eps: Some(e),
                    value: Some(tm as f64 / sched.t_n_worst),
                    ..base("tmix/t_n_worst")
                })
                .collect();
            let window = (t[0] - t[2]) as f64;
            rows.push(ResultRow {
                value: Some(window / params.window_unit()),
                ..base("window*delta/n")
            });
            rows.push(ResultRow {
                value: Some(window / t[1] as f64),
                ..base("window/tmix(1/4)")
            });
            Ok(rows)
        })
        .collect();
    Ok(chunks?.into_iter().flatten().collect())
}

pub fn figure_rows(opts: &FigureOptions) -> Result<Vec<ResultRow>> {
    let mut rows = match opts.figure {
        Figure::Fig1 => fig1(opts)?,
        Figure::Fig2 => fig2(opts)?,
        Figure::CutoffProfile => cutoff_profile(opts)?,
        Figure::GapScaling => gap_scaling(opts)?,
        Figure::WindowScaling => window_scaling(opts)?,
    };
    sort_rows(&mut rows);
    Ok(rows)
}

/// Writes `<dir>/<figure>.csv` and its sidecar; returns the CSV path.
pub fn figure_data(opts: &FigureOptions, dir: &Path) -> Result<PathBuf> {
    let clock = Instant::now();
    let rows = figure_rows(opts)?;
    let path = dir.join(format!("{}.csv", opts.figure.name()));
    write_outputs(&path, &rows, &Sidecar::new(opts, rows.len(), clock.elapsed().as_secs_f64()))?;
    Ok(path)
}
