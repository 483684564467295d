use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::chain::mixing::{mixing_times, snapshot_stride, uniform_grid};
use crate::chain::{build_kernel, conductance_profile, spectral_gap, stationary, tv_profile, Column, Start};
use crate::error::{Error, Result};
use crate::model::{cutoff_schedule, solve_zeta, ModelParams};
use crate::oracle::oracle_report;
use crate::sim::hitting::hitting_time_on;
use crate::sim::coupling::mag_coupling_coalescence_on;
use crate::sim::{replica_rng, run, standard_thresholds, two_coord_experiment, Direction, RecordSpec, SpinConfig};
use crate::tolerances;

use super::row::{sort_rows, write_csv, write_outputs, ResultRow, Sidecar};
use super::spec::{ExperimentSpec, Kind};

/// Process exit code for a failed run: 2 for a bad spec, 4 when a step
/// budget or horizon ran out, 3 for any other numerical failure.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter(_)
        | Error::TooLarge { .. }
        | Error::OutsideRegime { .. }
        | Error::NoPositiveRoot { .. }
        | Error::LatticeMismatch { .. }
        | Error::OrderViolation { .. } => 2,
        Error::NeedLargerHorizon { .. } | Error::NotHit { .. } | Error::NotCoalesced { .. } => 4,
        _ => 3,
    }
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: String,
    exit_code: i32,
}

/// Machine-readable description of `err` for standard error.
pub fn error_json(err: &Error) -> String {
    let debug = format!("{err:?}");
    let variant = debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("");
    serde_json::to_string(&ErrorReport {
        error: variant,
        message: err.to_string(),
        exit_code: exit_code(err),
    })
    .expect("error serializes")
}

/// Rows of a validated spec, sorted by `(n, beta, replica, t)`.
pub fn compute_rows(spec: &ExperimentSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let kind = spec.effective_kind();
    let mut rows = if kind == Kind::Zeta {
        spec.beta.iter().map(|&b| zeta_row(b)).collect::<Result<Vec<_>>>()?
    } else {
        let points: Vec<(usize, f64)> =
            spec.n.iter().flat_map(|&n| spec.beta.iter().map(move |&b| (n, b))).collect();
        let chunks: Result<Vec<Vec<ResultRow>>> =
            points.par_iter().map(|&(n, b)| point_rows(spec, kind, &ModelParams::new(n, b)?)).collect();
        chunks?.into_iter().flatten().collect()
    };
    sort_rows(&mut rows);
    Ok(rows)
}

/// Runs a spec: CSV to the output path (plus sidecar) or to stdout.
/// Returns the number of rows written.
pub fn run_spec(spec: &ExperimentSpec) -> Result<usize> {
    let clock = Instant::now();
    let rows = compute_rows(spec)?;
    match &spec.output {
        Some(path) => {
            let sidecar = Sidecar::new(spec, rows.len(), clock.elapsed().as_secs_f64());
            write_outputs(path, &rows, &sidecar)?;
        }
        None => write_csv(&rows, std::io::stdout().lock())?,
    }
    Ok(rows.len())
}

fn zeta_row(beta: f64) -> Result<ResultRow> {
    let zeta = solve_zeta(beta, tolerances::ZETA_RESIDUAL)?;
    Ok(ResultRow {
        kind: Kind::Zeta.name().into(),
        label: "zeta".into(),
        beta: Some(beta),
        delta: Some(beta - 1.0),
        zeta: Some(zeta),
        value: Some(zeta),
        ..Default::default()
    })
}

/// Horizon long enough for the chain to mix comfortably: twice the
/// worst-start cutoff time when the schedule applies, else a rough
/// high-temperature estimate. Mixing-time searches double it as needed.
pub fn default_horizon(params: &ModelParams) -> u64 {
    let n = params.n as f64;
    let t = match cutoff_schedule(params) {
        Ok(sched) => 2.0 * sched.t_n_worst,
        Err(_) => n * n.ln() / params.delta.abs().max(n.powf(-0.5)),
    };
    (t.ceil() as u64).max(4 * params.n as u64)
}

/// Default simulation length: the worst-start cutoff time plus five windows.
pub fn default_sim_steps(params: &ModelParams) -> u64 {
    match cutoff_schedule(params) {
        Ok(sched) => (sched.t_n_worst + 5.0 * sched.window_unit).ceil() as u64,
        Err(_) => default_horizon(params),
    }
}

/// Spin configuration for a start label.
pub fn start_config(start: Start, n: usize) -> Result<SpinConfig> {
    match start {
        Start::Bottom => SpinConfig::with_magnetization(n, 0.0),
        Start::Top | Start::AllPlus => Ok(SpinConfig::all_plus(n)),
        Start::AllMinus => Ok(SpinConfig::all_minus(n)),
        Start::Value(s) => SpinConfig::with_magnetization(n, s),
    }
}

fn seed(spec: &ExperimentSpec) -> u64 {
    spec.base_seed.unwrap_or_default()
}

fn point_rows(spec: &ExperimentSpec, kind: Kind, params: &ModelParams) -> Result<Vec<ResultRow>> {
    let censored = spec.censored;
    let name = kind.name();
    let base = |label: &str| ResultRow::for_params(name, label, params, censored);
    match kind {
        Kind::Zeta | Kind::Sweep => unreachable!("handled by compute_rows"),
        Kind::KernelDump => {
            let k = build_kernel(params, censored);
            Ok((0..k.len())
                .map(|i| ResultRow {
                    s: Some(k.lattice().s(i)),
                    up: Some(k.p()[i]),
                    down: Some(k.q()[i]),
                    hold: Some(k.h()[i]),
                    ..base("kernel")
                })
                .collect())
        }
        Kind::Stationary => {
            let k = build_kernel(params, censored);
            let pi = stationary(&k)?;
            Ok(pi
                .mass()
                .iter()
                .enumerate()
                .map(|(i, &m)| ResultRow {
                    s: Some(k.lattice().s(i)),
                    prob: Some(m),
                    ..base("pi")
                })
                .collect())
        }
        Kind::TvProfile => {
            let step = spec.every.unwrap_or_else(|| snapshot_stride(params));
            let horizon = spec.steps.unwrap_or_else(|| default_horizon(params));
            let prof = tv_profile(params, censored, &spec.start, &uniform_grid(step, horizon))?;
            let mut rows = Vec::new();
            let mut series: Vec<(String, Vec<f64>)> =
                prof.starts.iter().zip(&prof.d).map(|(s, d)| (s.label(), d.clone())).collect();
            if prof.starts.len() > 1 {
                series.push(("worst".into(), prof.column(Column::Worst)));
            }
            for (label, d) in series {
                for (&t, &dt) in prof.times.iter().zip(&d) {
                    rows.push(ResultRow {
                        start: Some(label.clone()),
                        t: Some(t),
                        d_tv: Some(dt),
                        ..base("d_tv")
                    });
                }
            }
            Ok(rows)
        }
        Kind::Tmix => {
            let eps = if spec.epsilon.is_empty() { vec![0.25] } else { spec.epsilon.clone() };
            let initial = spec.steps.unwrap_or_else(|| default_horizon(params));
            let max_horizon = initial.saturating_mul(64);
            let (prof, _) = mixing_times(params, censored, &spec.start, &eps, Column::Worst, initial, max_horizon)?;
            let t_n = cutoff_schedule(params).ok().map(|s| s.t_n_worst);
            let mut cols: Vec<(String, Column)> =
                prof.starts.iter().enumerate().map(|(i, s)| (s.label(), Column::Start(i))).collect();
            if prof.starts.len() > 1 {
                cols.push(("worst".into(), Column::Worst));
            }
            let mut rows = Vec::new();
            for (label, col) in cols {
                for &e in &eps {
                    let t = crate::chain::t_mix(&prof, e, col)?;
                    rows.push(ResultRow {
                        start: Some(label.clone()),
                        t: Some(t),
                        eps: Some(e),
                        value: t_n.map(|tn| t as f64 / tn),
                        ..base("tmix/t_n_worst")
                    });
                }
            }
            Ok(rows)
        }
        Kind::Gap => {
            let k = build_kernel(params, censored);
            let g = spectral_gap(&k)?;
            Ok(vec![ResultRow {
                gap: Some(g.gap),
                lambda2: Some(g.lambda2),
                dirichlet_bound: Some(g.dirichlet_bound),
                value: Some(g.gap * params.window_unit()),
                ..base("gap*n/delta")
            }])
        }
        Kind::Conductance => {
            let k = build_kernel(params, censored);
            let c = conductance_profile(&k)?;
            Ok(vec![ResultRow {
                phi_star: Some(c.phi_star),
                s: Some(k.lattice().s(c.phi_star_cut)),
                value: Some(c.phi_star * params.window_unit().abs().sqrt()),
                ..base("phi_star*sqrt(n/delta)")
            }])
        }
        Kind::Simulate => simulate_rows(spec, params, &base),
        Kind::Hitting => {
            let k = build_kernel(params, censored);
            let start = spec.start[0];
            let target = match spec.threshold {
                Some(x) => x,
                None => params.zeta()?,
            };
            let s0 = k.lattice().s(start.resolve(k.lattice())?);
            let dir = if target >= s0 { Direction::Up } else { Direction::Down };
            let max_steps = spec.steps.unwrap_or_else(|| 100 * default_sim_steps(params));
            (0..spec.replica_count())
                .into_par_iter()
                .map(|r| {
                    let tau = hitting_time_on(&k, start, target, dir, max_steps, &mut replica_rng(seed(spec), r))?;
                    Ok(ResultRow {
                        start: Some(start.label()),
                        s: Some(target),
                        tau: Some(tau),
                        value: Some(tau as f64 / params.window_unit().abs()),
                        seed: spec.base_seed,
                        replica: Some(r),
                        ..base("tau*delta/n")
                    })
                })
                .collect()
        }
        Kind::Coalesce => {
            if !censored {
                return Err(Error::InvalidParameter("coalesce runs the censored chains only".into()));
            }
            let k = build_kernel(params, true);
            let (a, b) = (spec.start[0], spec.start_other.unwrap_or(Start::Top));
            let max_steps = spec.steps.unwrap_or_else(|| 100 * default_sim_steps(params));
            (0..spec.replica_count())
                .into_par_iter()
                .map(|r| {
                    let tau = mag_coupling_coalescence_on(&k, params, a, b, max_steps, &mut replica_rng(seed(spec), r))?;
                    Ok(ResultRow {
                        start: Some(format!("{}|{}", a.label(), b.label())),
                        tau: Some(tau),
                        value: Some(tau as f64 / params.window_unit().abs()),
                        seed: spec.base_seed,
                        replica: Some(r),
                        ..base("tau*delta/n")
                    })
                })
                .collect()
        }
        Kind::TwoCoord => {
            if !censored {
                return Err(Error::InvalidParameter("two-coord runs the censored dynamics only".into()));
            }
            let a = spec.start[0];
            let b = spec.start_other.unwrap_or(Start::AllPlus);
            let sigma0 = start_config(a, params.n)?;
            let sigma_tilde = start_config(b, params.n)?;
            let steps = spec.steps.unwrap_or_else(|| default_sim_steps(params));
            let every = spec.every.unwrap_or(params.n as u64);
            let checkpoints = uniform_grid(every, steps);
            let chunks: Result<Vec<Vec<ResultRow>>> = (0..spec.replica_count())
                .into_par_iter()
                .map(|r| {
                    let mut rng = replica_rng(seed(spec), 2 * r);
                    let mut rng_tilde = replica_rng(seed(spec), 2 * r + 1);
                    let stats = two_coord_experiment(&sigma0, &sigma_tilde, params, &checkpoints, &mut rng, &mut rng_tilde)?;
                    Ok(stats
                        .into_iter()
                        .map(|st| ResultRow {
                            start: Some(format!("{}|{}", a.label(), b.label())),
                            t: Some(st.t),
                            s: Some(st.s),
                            r: Some(st.r),
                            u: Some(st.u_count),
                            v: Some(st.v_count),
                            in_xi: Some(st.in_xi),
                            in_omega0: Some(st.in_omega0),
                            value: Some(st.s_tilde),
                            seed: spec.base_seed,
                            replica: Some(r),
                            ..base("s_tilde")
                        })
                        .collect())
                })
                .collect();
            Ok(chunks?.into_iter().flatten().collect())
        }
        Kind::OracleCheck => {
            let report = oracle_report(params.n, params.beta, spec.steps.unwrap_or(200))?;
            let mut rows = vec![
                ResultRow { value: Some(report.kernel_error), ..base("lumped-kernel-error") },
                ResultRow {
                    censored: Some(false),
                    value: Some(report.ordinary_kernel_error),
                    ..base("lumped-kernel-error")
                },
                ResultRow { value: Some(report.stationary_error), ..base("stationary-error") },
                ResultRow { value: Some(report.tv_identity_error), ..base("tv-identity-error") },
            ];
            if let Some(l) = report.lambda2 {
                rows.push(ResultRow {
                    lambda2: Some(l.full_dense),
                    value: Some((l.full_dense - l.chain).abs()),
                    ..base("lambda2-error")
                });
            }
            Ok(rows)
        }
    }
}

fn simulate_rows(
    spec: &ExperimentSpec,
    params: &ModelParams,
    base: &(dyn Fn(&str) -> ResultRow + Sync),
) -> Result<Vec<ResultRow>> {
    let steps = spec.steps.unwrap_or_else(|| default_sim_steps(params));
    let every = spec.every.unwrap_or(params.n as u64);
    let thresholds = if params.zeta.is_some() { standard_thresholds(params) } else { Vec::new() };
    let record = RecordSpec {
        every,
        thresholds,
        stop_when_crossed: false,
    };
    let chunks: Result<Vec<Vec<ResultRow>>> = spec
        .start
        .iter()
        .flat_map(|&start| (0..spec.replica_count()).map(move |r| (start, r)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(start, r)| {
            let config = start_config(start, params.n)?;
            let rec = run(&config, params, steps, &mut replica_rng(seed(spec), r), spec.censored, &record);
            let mut rows: Vec<ResultRow> = rec
                .times
                .iter()
                .zip(&rec.magnetization)
                .map(|(&t, &s)| ResultRow {
                    start: Some(start.label()),
                    t: Some(t),
                    s: Some(s),
                    seed: spec.base_seed,
                    replica: Some(r),
                    ..base("trajectory")
                })
                .collect();
            for c in &rec.crossings {
                rows.push(ResultRow {
                    start: Some(start.label()),
                    tau: c.time,
                    value: Some(c.threshold.value),
                    seed: spec.base_seed,
                    replica: Some(r),
                    ..base(&format!("crossing:{}", c.threshold.label))
                });
            }
            Ok(rows)
        })
        .collect();
    Ok(chunks?.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: Kind, n: &[usize], beta: &[f64]) -> ExperimentSpec {
        let mut s = ExperimentSpec::new(kind);
        s.n = n.to_vec();
        s.beta = beta.to_vec();
        s
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::InvalidParameter("x".into())), 2);
        assert_eq!(exit_code(&Error::NotHit { max_steps: 1 }), 4);
        assert_eq!(exit_code(&Error::Reducible { from: 0, to: 1 }), 3);
        let json: serde_json::Value = serde_json::from_str(&error_json(&Error::TooLarge { n: 13, limit: 12 })).unwrap();
        assert_eq!(json["error"], "TooLarge");
        assert_eq!(json["exit_code"], 2);
    }

    #[test]
    fn zeta_single_row() {
        let rows = compute_rows(&spec(Kind::Zeta, &[], &[1.2])).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].value, Some(solve_zeta(1.2, tolerances::ZETA_RESIDUAL).unwrap()));
    }

    #[test]
    fn sweep_gap_has_one_row_per_point() {
        let mut s = spec(Kind::Sweep, &[256, 512, 1024, 2048], &[1.2]);
        s.of = Some(Kind::Gap);
        let rows = compute_rows(&s).unwrap();
        assert_eq!(rows.iter().map(|r| r.n.unwrap()).collect::<Vec<_>>(), [256, 512, 1024, 2048]);
        assert!(rows.iter().all(|r| r.kind == "gap"));
    }

    #[test]
    fn tmix_matches_library() {
        let p = ModelParams::new(256, 1.2).unwrap();
        let mut s = spec(Kind::Tmix, &[256], &[1.2]);
        s.epsilon = vec![0.25];
        let rows = compute_rows(&s).unwrap();
        let (_, t) = mixing_times(&p, true, &[Start::Bottom], &[0.25], Column::Worst, default_horizon(&p), u64::MAX).unwrap();
        assert_eq!(rows[0].t, Some(t[0]));
    }

    #[test]
    fn replicated_runs_are_reproducible() {
        let mut s = spec(Kind::Hitting, &[128], &[1.3]);
        s.replicas = 4;
        s.base_seed = Some(11);
        let a = compute_rows(&s).unwrap();
        let b = compute_rows(&s).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 4);
    }

    #[test]
    fn two_coord_rejects_far_start() {
        let mut s = spec(Kind::TwoCoord, &[64], &[1.2]);
        s.start = vec![Start::AllPlus];
        s.base_seed = Some(1);
        s.steps = Some(10);
        assert!(matches!(compute_rows(&s), Err(Error::InvalidParameter(_))));
    }
}
