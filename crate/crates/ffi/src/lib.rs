//! C ABI over the exact magnetization-chain analysis and the spin simulator.
//!
//! Every function returns a [`CwlabStatus`]; on failure the message is kept
//! per thread and read with [`cwlab_last_error_message`]. Handles are opaque
//! and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cwlab::chain::mixing::mixing_times;
use cwlab::chain::{build_kernel, conductance_profile, spectral_gap, stationary, BirthDeathKernel, Column, Start};
use cwlab::experiments::runner::default_horizon;
use cwlab::sim::rng::draw;
use cwlab::sim::{replica_rng, FlipTable, SimRng, SpinConfig};
use cwlab::{solve_zeta, tolerances, Error, ModelParams};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CwlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    NoPositiveRoot = 3,
    OutsideRegime = 4,
    Reducible = 5,
    NotReversible = 6,
    NumericOverflow = 7,
    NeedLargerHorizon = 8,
    BufferTooSmall = 9,
    NumericFailure = 10,
    Panic = 11,
}

/// Starting state selector for [`cwlab_tmix`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CwlabStart {
    Bottom = 0,
    Top = 1,
    /// Use the accompanying magnetization value.
    Value = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CwlabGap {
    pub gap: f64,
    pub lambda2: f64,
    pub lambda_min: f64,
    pub dirichlet_bound: f64,
}

/// Magnetization birth-and-death kernel.
pub struct CwlabKernel {
    params: ModelParams,
    kernel: BirthDeathKernel,
}

/// Spin dynamics with its own random stream.
pub struct CwlabSimulator {
    config: SpinConfig,
    table: FlipTable,
    rng: SimRng,
    censored: bool,
    steps: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> CwlabStatus {
    match err {
        Error::InvalidParameter(_) | Error::TooLarge { .. } | Error::LatticeMismatch { .. } => CwlabStatus::InvalidParameter,
        Error::NoPositiveRoot { .. } => CwlabStatus::NoPositiveRoot,
        Error::OutsideRegime { .. } => CwlabStatus::OutsideRegime,
        Error::Reducible { .. } => CwlabStatus::Reducible,
        Error::NotReversible { .. } => CwlabStatus::NotReversible,
        Error::NumericOverflow { .. } => CwlabStatus::NumericOverflow,
        Error::NeedLargerHorizon { .. } => CwlabStatus::NeedLargerHorizon,
        _ => CwlabStatus::NumericFailure,
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard<F>(f: F) -> CwlabStatus
where
    F: FnOnce() -> Result<(), CwlabStatus>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CwlabStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic".into());
            CwlabStatus::Panic
        }
    }
}

fn check<T>(r: cwlab::Result<T>) -> Result<T, CwlabStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), CwlabStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        Err(CwlabStatus::NullPointer)
    } else {
        Ok(())
    }
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL,
/// or 0 if there is none.
///
/// # Safety
/// `buf` must be null or valid for `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn cwlab_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let k = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, k);
                *buf.add(k) = 0;
            }
            bytes.len()
        }
    })
}

/// Positive root of `tanh(beta x) = x`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cwlab_zeta(beta: f64, out: *mut f64) -> CwlabStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = check(solve_zeta(beta, tolerances::ZETA_RESIDUAL))?;
        Ok(())
    })
}

/// Builds the magnetization kernel on `n` spins.
///
/// # Safety
/// `out` must be valid for one write. The handle written there is owned by
/// the caller.
#[no_mangle]
pub unsafe extern "C" fn cwlab_kernel_new(n: usize, beta: f64, censored: bool, out: *mut *mut CwlabKernel) -> CwlabStatus {
    guard(|| {
        non_null(out, "out")?;
        let params = check(ModelParams::new(n, beta))?;
        let kernel = build_kernel(&params, censored);
        *out = Box::into_raw(Box::new(CwlabKernel { params, kernel }));
        Ok(())
    })
}

/// # Safety
/// `kernel` must be null or a handle from [`cwlab_kernel_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cwlab_kernel_free(kernel: *mut CwlabKernel) {
    if !kernel.is_null() {
        drop(Box::from_raw(kernel));
    }
}

/// Number of lattice states, or 0 for a null handle.
///
/// # Safety
/// `kernel` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cwlab_kernel_len(kernel: *const CwlabKernel) -> usize {
    kernel.as_ref().map_or(0, |k| k.kernel.len())
}

/// Writes the up, down and hold probabilities of every state; each buffer
/// needs [`cwlab_kernel_len`] entries.
///
/// # Safety
/// `kernel` must be a live handle and each buffer valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn cwlab_kernel_rows(
    kernel: *const CwlabKernel,
    up: *mut f64,
    down: *mut f64,
    hold: *mut f64,
    len: usize,
) -> CwlabStatus {
    guard(|| {
        non_null(kernel, "kernel")?;
        let k = &(*kernel).kernel;
        for (buf, name) in [(up, "up"), (down, "down"), (hold, "hold")] {
            non_null(buf, name)?;
        }
        if len < k.len() {
            set_error(format!("buffers hold {len} entries, kernel has {}", k.len()));
            return Err(CwlabStatus::BufferTooSmall);
        }
        ptr::copy_nonoverlapping(k.p().as_ptr(), up, k.len());
        ptr::copy_nonoverlapping(k.q().as_ptr(), down, k.len());
        ptr::copy_nonoverlapping(k.h().as_ptr(), hold, k.len());
        Ok(())
    })
}

/// Stationary law into `out` (`len` at least [`cwlab_kernel_len`]).
///
/// # Safety
/// `kernel` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn cwlab_kernel_stationary(kernel: *const CwlabKernel, out: *mut f64, len: usize) -> CwlabStatus {
    guard(|| {
        non_null(kernel, "kernel")?;
        non_null(out, "out")?;
        let pi = check(stationary(&(*kernel).kernel))?;
        if len < pi.mass().len() {
            set_error(format!("buffer holds {len} entries, law has {}", pi.mass().len()));
            return Err(CwlabStatus::BufferTooSmall);
        }
        ptr::copy_nonoverlapping(pi.mass().as_ptr(), out, pi.mass().len());
        Ok(())
    })
}

/// # Safety
/// `kernel` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cwlab_kernel_gap(kernel: *const CwlabKernel, out: *mut CwlabGap) -> CwlabStatus {
    guard(|| {
        non_null(kernel, "kernel")?;
        non_null(out, "out")?;
        let g = check(spectral_gap(&(*kernel).kernel))?;
        *out = CwlabGap {
            gap: g.gap,
            lambda2: g.lambda2,
            lambda_min: g.lambda_min,
            dirichlet_bound: g.dirichlet_bound,
        };
        Ok(())
    })
}

/// Bottleneck ratio of the kernel.
///
/// # Safety
/// `kernel` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cwlab_kernel_phi_star(kernel: *const CwlabKernel, out: *mut f64) -> CwlabStatus {
    guard(|| {
        non_null(kernel, "kernel")?;
        non_null(out, "out")?;
        *out = check(conductance_profile(&(*kernel).kernel))?.phi_star;
        Ok(())
    })
}

fn to_start(start: CwlabStart, value: f64) -> Start {
    match start {
        CwlabStart::Bottom => Start::Bottom,
        CwlabStart::Top => Start::Top,
        CwlabStart::Value => Start::Value(value),
    }
}

/// Exact mixing time `t_mix(epsilon)` of the kernel's chain from one start.
/// `value` is read only for [`CwlabStart::Value`].
///
/// # Safety
/// `kernel` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cwlab_tmix(
    kernel: *const CwlabKernel,
    start: CwlabStart,
    value: f64,
    epsilon: f64,
    out: *mut u64,
) -> CwlabStatus {
    guard(|| {
        non_null(kernel, "kernel")?;
        non_null(out, "out")?;
        let k = &*kernel;
        let initial = default_horizon(&k.params);
        let (_, t) = check(mixing_times(
            &k.params,
            k.kernel.lattice().censored(),
            &[to_start(start, value)],
            &[epsilon],
            Column::Worst,
            initial,
            initial.saturating_mul(64),
        ))?;
        *out = t[0];
        Ok(())
    })
}

/// Spin dynamics on `n` spins started at magnetization `s0` (rounded up to
/// the lattice), driven by replica `replica` of `seed`.
///
/// # Safety
/// `out` must be valid for one write. The handle is owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn cwlab_simulator_new(
    n: usize,
    beta: f64,
    censored: bool,
    s0: f64,
    seed: u64,
    replica: u64,
    out: *mut *mut CwlabSimulator,
) -> CwlabStatus {
    guard(|| {
        non_null(out, "out")?;
        let params = check(ModelParams::new(n, beta))?;
        let mut config = check(SpinConfig::with_magnetization(n, s0))?;
        if censored && config.sum() < 0 {
            config = check(SpinConfig::with_magnetization(n, -s0))?;
        }
        *out = Box::into_raw(Box::new(CwlabSimulator {
            config,
            table: FlipTable::new(&params),
            rng: replica_rng(seed, replica),
            censored,
            steps: 0,
        }));
        Ok(())
    })
}

/// # Safety
/// `sim` must be null or a handle from [`cwlab_simulator_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cwlab_simulator_free(sim: *mut CwlabSimulator) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Advances the dynamics by `steps` single-site updates.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cwlab_simulator_step(sim: *mut CwlabSimulator, steps: u64) -> CwlabStatus {
    guard(|| {
        non_null(sim, "sim")?;
        let s = &mut *sim;
        let n = s.config.n();
        for _ in 0..steps {
            s.config.step(draw(&mut s.rng, n), &s.table, s.censored);
        }
        s.steps += steps;
        Ok(())
    })
}

/// Current magnetization, or NaN for a null handle.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cwlab_simulator_magnetization(sim: *const CwlabSimulator) -> f64 {
    sim.as_ref().map_or(f64::NAN, |s| s.config.magnetization())
}

/// Updates performed so far, or 0 for a null handle.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cwlab_simulator_steps(sim: *const CwlabSimulator) -> u64 {
    sim.as_ref().map_or(0, |s| s.steps)
}

/// Copies the current spins (+1 or -1) into `out`.
///
/// # Safety
/// `sim` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn cwlab_simulator_spins(sim: *const CwlabSimulator, out: *mut i8, len: usize) -> CwlabStatus {
    guard(|| {
        non_null(sim, "sim")?;
        non_null(out, "out")?;
        let spins = (*sim).config.spins();
        if len < spins.len() {
            set_error(format!("buffer holds {len} entries, configuration has {}", spins.len()));
            return Err(CwlabStatus::BufferTooSmall);
        }
        ptr::copy_nonoverlapping(spins.as_ptr(), out, spins.len());
        Ok(())
    })
}
