//! Random streams. Every replica owns a ChaCha8 generator keyed by the base
//! seed, with the replica number selecting the stream:
//! `ChaCha8Rng::seed_from_u64(base_seed)` then `set_stream(replica)`.
//! Streams for different replicas never overlap.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::spins::UpdateDraw;

pub type SimRng = ChaCha8Rng;

pub fn replica_rng(base_seed: u64, replica: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(replica);
    rng
}

/// Uniform site in `[0, n)` and uniform `u` in `[0, 1)`.
pub fn draw<R: Rng + ?Sized>(rng: &mut R, n: usize) -> UpdateDraw {
    UpdateDraw {
        site: rng.random_range(0..n),
        u: rng.random::<f64>(),
    }
}
