//! Values computed once by an independent high-precision evaluation and
//! frozen here.

use cwlab::chain::mixing::mixing_times;
use cwlab::chain::{build_kernel, conductance_profile, spectral_gap, Column, Start};
use cwlab::{cutoff_schedule, p_plus, solve_zeta, ModelParams};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn zeta_digits() {
    for (beta, z) in [
        (1.2, 0.6585696604057540485777302),
        (2.0, 0.9575040240772687406765015),
        (1.25, 0.7104117834878703714789927),
        (1.3, 0.7520576366556309151406828),
        (1.1, 0.5029405749446416330020755),
        (1.01, 0.1716617792793340035964363),
    ] {
        assert!((solve_zeta(beta, 1e-14).unwrap() - z).abs() < 1e-12, "beta {beta}");
    }
}

#[test]
fn flip_probability_at_full_magnetization() {
    assert!((p_plus(1.0, 1.2) - 0.9168273035060776293370476).abs() < 1e-15);
}

#[test]
fn worst_start_cutoff_times() {
    for (n, t) in [(1024, 15435.93185110711462026562), (4096, 84799.01852135295518179083)] {
        let sched = cutoff_schedule(&ModelParams::new(n, 1.2).unwrap()).unwrap();
        assert!(rel(sched.t_n_worst, t) < 1e-12, "n {n}: {}", sched.t_n_worst);
    }
}

#[test]
fn gap_and_bottleneck_at_256() {
    let k = build_kernel(&ModelParams::new(256, 1.2).unwrap(), true);
    assert!(rel(spectral_gap(&k).unwrap().gap, 6.255008431841347e-4) < 1e-9);
    // the reference minimized over every interval of states, not just end cuts
    assert!(rel(conductance_profile(&k).unwrap().phi_star, 0.010638830048727617547) < 1e-10);
}

#[test]
fn exact_mixing_times() {
    let p = ModelParams::new(256, 1.2).unwrap();
    let (_, t) = mixing_times(&p, true, &[Start::Bottom, Start::Top], &[0.25], Column::Start(0), 8192, 1 << 20).unwrap();
    assert_eq!(t[0], 4107);
    let (_, t) = mixing_times(&p, true, &[Start::Bottom, Start::Top], &[0.25], Column::Start(1), 8192, 1 << 20).unwrap();
    assert_eq!(t[0], 1383);
    let p = ModelParams::new(1024, 1.2).unwrap();
    let (_, t) = mixing_times(&p, true, &[Start::Bottom], &[0.25], Column::Worst, 32768, 1 << 22).unwrap();
    assert_eq!(t[0], 23353);
}
