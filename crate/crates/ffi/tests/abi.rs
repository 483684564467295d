use std::ffi::c_char;
use std::process::Command;
use std::ptr;

use cwlab_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    let len = unsafe { cwlab_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..len.min(255)].iter().map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

fn kernel(n: usize, beta: f64, censored: bool) -> *mut CwlabKernel {
    let mut k = ptr::null_mut();
    assert_eq!(unsafe { cwlab_kernel_new(n, beta, censored, &mut k) }, CwlabStatus::Ok);
    k
}

#[test]
fn zeta_and_errors() {
    let mut z = 0.0;
    assert_eq!(unsafe { cwlab_zeta(1.2, &mut z) }, CwlabStatus::Ok);
    assert!((z - 0.6585696604057540486).abs() < 1e-12);
    assert_eq!(unsafe { cwlab_zeta(0.9, &mut z) }, CwlabStatus::NoPositiveRoot);
    assert!(last_error().contains("no positive root"));
    assert_eq!(unsafe { cwlab_zeta(1.2, ptr::null_mut()) }, CwlabStatus::NullPointer);
}

#[test]
fn kernel_queries_match_library() {
    let k = kernel(256, 1.2, true);
    let len = unsafe { cwlab_kernel_len(k) };
    assert_eq!(len, 129);

    let (mut up, mut down, mut hold) = (vec![0.0; len], vec![0.0; len], vec![0.0; len]);
    assert_eq!(
        unsafe { cwlab_kernel_rows(k, up.as_mut_ptr(), down.as_mut_ptr(), hold.as_mut_ptr(), len) },
        CwlabStatus::Ok
    );
    for i in 0..len {
        assert!((up[i] + down[i] + hold[i] - 1.0).abs() < 1e-14);
    }
    assert_eq!(down[0], 0.0);

    let mut pi = vec![0.0; len];
    assert_eq!(unsafe { cwlab_kernel_stationary(k, pi.as_mut_ptr(), len) }, CwlabStatus::Ok);
    assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert_eq!(unsafe { cwlab_kernel_stationary(k, pi.as_mut_ptr(), 3) }, CwlabStatus::BufferTooSmall);

    let mut gap = CwlabGap::default();
    assert_eq!(unsafe { cwlab_kernel_gap(k, &mut gap) }, CwlabStatus::Ok);
    assert!((gap.gap - 6.255008431841347e-4).abs() < 1e-12);
    let mut phi = 0.0;
    assert_eq!(unsafe { cwlab_kernel_phi_star(k, &mut phi) }, CwlabStatus::Ok);
    assert!(phi * phi / 2.0 <= gap.gap && gap.gap <= 2.0 * phi);

    let mut t = 0u64;
    assert_eq!(unsafe { cwlab_tmix(k, CwlabStart::Bottom, 0.0, 0.25, &mut t) }, CwlabStatus::Ok);
    assert_eq!(t, 4107);
    assert_eq!(unsafe { cwlab_tmix(k, CwlabStart::Top, 0.0, 0.25, &mut t) }, CwlabStatus::Ok);
    assert_eq!(t, 1383);
    assert_eq!(unsafe { cwlab_tmix(k, CwlabStart::Bottom, 0.0, 1.5, &mut t) }, CwlabStatus::InvalidParameter);
    unsafe { cwlab_kernel_free(k) };
}

#[test]
fn null_handles_are_harmless() {
    unsafe {
        cwlab_kernel_free(ptr::null_mut());
        cwlab_simulator_free(ptr::null_mut());
        assert_eq!(cwlab_kernel_len(ptr::null()), 0);
        assert!(cwlab_simulator_magnetization(ptr::null()).is_nan());
        let mut g = CwlabGap::default();
        assert_eq!(cwlab_kernel_gap(ptr::null(), &mut g), CwlabStatus::NullPointer);
    }
}

#[test]
fn simulator_is_seeded_and_censored() {
    let run = |seed: u64| unsafe {
        let mut sim = ptr::null_mut();
        assert_eq!(cwlab_simulator_new(500, 1.3, true, -0.2, seed, 0, &mut sim), CwlabStatus::Ok);
        assert!(cwlab_simulator_magnetization(sim) >= 0.0);
        let mut path = Vec::new();
        for _ in 0..50 {
            assert_eq!(cwlab_simulator_step(sim, 500), CwlabStatus::Ok);
            let s = cwlab_simulator_magnetization(sim);
            assert!(s >= 0.0);
            path.push(s);
        }
        assert_eq!(cwlab_simulator_steps(sim), 25_000);
        let mut spins = vec![0i8; 500];
        assert_eq!(cwlab_simulator_spins(sim, spins.as_mut_ptr(), 500), CwlabStatus::Ok);
        let sum: i64 = spins.iter().map(|&s| s as i64).sum();
        assert_eq!(sum as f64 / 500.0, *path.last().unwrap());
        cwlab_simulator_free(sim);
        path
    };
    assert_eq!(run(7), run(7));
    assert_ne!(run(7), run(8));
}

#[test]
fn invalid_size_is_reported() {
    let mut k = ptr::null_mut();
    assert_eq!(unsafe { cwlab_kernel_new(1, 1.2, true, &mut k) }, CwlabStatus::InvalidParameter);
    assert!(k.is_null());
    assert!(last_error().contains("n must be"));
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/cwlab.h");
    let Ok(out) = Command::new("cc")
        .args(["-std=c11", "-Wall", "-Werror", "-fsyntax-only", "-x", "c", header])
        .output()
    else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
