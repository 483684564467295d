use crate::error::{Error, Result};

/// Largest `n` for enumerated measures and kernels.
pub const MAX_N: usize = 12;
/// Largest `n` for dense eigensolves.
pub const MAX_EIGEN_N: usize = 10;

/// Enumerated configurations as bitmasks (bit `i` set means spin `i` is +1).
/// The censored space keeps `{sigma : S(sigma) >= 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigSpace {
    n: usize,
    censored: bool,
    states: Vec<u32>,
    index: Vec<Option<usize>>,
}

impl ConfigSpace {
    pub fn new(n: usize, censored: bool) -> Result<Self> {
        if n > MAX_N {
            return Err(Error::TooLarge { n, limit: MAX_N });
        }
        if n < 2 {
            return Err(Error::InvalidParameter(format!("n must be >= 2, got {n}")));
        }
        let mut index = vec![None; 1 << n];
        let mut states = Vec::new();
        for mask in 0u32..(1 << n) {
            if !censored || 2 * mask.count_ones() as usize >= n {
                index[mask as usize] = Some(states.len());
                states.push(mask);
            }
        }
        Ok(Self {
            n,
            censored,
            states,
            index,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn censored(&self) -> bool {
        self.censored
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn mask(&self, idx: usize) -> u32 {
        self.states[idx]
    }

    pub fn index_of(&self, mask: u32) -> Option<usize> {
        self.index[mask as usize]
    }

    /// Spin sum of a mask.
    pub fn sum_of(&self, mask: u32) -> i64 {
        2 * mask.count_ones() as i64 - self.n as i64
    }

    pub fn sum(&self, idx: usize) -> i64 {
        self.sum_of(self.states[idx])
    }

    /// Global negation within `n` bits.
    pub fn negate(&self, mask: u32) -> u32 {
        !mask & ((1u32 << self.n) - 1)
    }

    pub fn all_plus(&self) -> usize {
        self.index_of((1u32 << self.n) - 1).unwrap()
    }
}
