use rand::Rng;

use crate::chain::{build_kernel, BirthDeathKernel, Start};
use crate::error::{Error, Result};
use crate::model::ModelParams;

use super::trajectory::{lattice_sum, Direction};

/// Step of a birth-and-death chain driven by one uniform: up if
/// `u < p`, down if `u >= 1 - q`, otherwise hold. With a shared `u` this is
/// the monotone coupling whenever `p_x + q_{x+1} <= 1`.
#[inline]
pub fn mag_step(kernel: &BirthDeathKernel, index: usize, u: f64) -> usize {
    if u < kernel.p()[index] {
        index + 1
    } else if u >= 1.0 - kernel.q()[index] {
        index - 1
    } else {
        index
    }
}

/// First time the magnetization chain started at `s0` reaches `threshold`
/// (rounded up for upward, down for downward crossings). The magnetization
/// of the spin dynamics has exactly this law, so the chain is simulated on
/// the lattice directly.
pub fn hitting_time<R: Rng + ?Sized>(
    s0: Start,
    threshold: f64,
    direction: Direction,
    params: &ModelParams,
    censored: bool,
    max_steps: u64,
    rng: &mut R,
) -> Result<u64> {
    let kernel = build_kernel(params, censored);
    hitting_time_on(&kernel, s0, threshold, direction, max_steps, rng)
}

/// [`hitting_time`] with a prebuilt kernel, for replicated experiments.
pub fn hitting_time_on<R: Rng + ?Sized>(
    kernel: &BirthDeathKernel,
    s0: Start,
    threshold: f64,
    direction: Direction,
    max_steps: u64,
    rng: &mut R,
) -> Result<u64> {
    let lattice = kernel.lattice();
    let mut index = s0.resolve(lattice)?;
    let target = lattice_sum(threshold, direction, lattice.n());
    let reached = |i: usize| match direction {
        Direction::Up => lattice.j(i) >= target,
        Direction::Down => lattice.j(i) <= target,
    };
    if reached(index) {
        return Ok(0);
    }
    for t in 1..=max_steps {
        index = mag_step(kernel, index, rng.random::<f64>());
        if reached(index) {
            return Ok(t);
        }
    }
    Err(Error::NotHit { max_steps })
}
