use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Magnetization lattice, indexed by the signed spin sum `j`.
///
/// Ordinary: `j in {-n, -n+2, ..., n}`. Censored: `j in {n mod 2, ..., n}`.
/// States are addressed by index `0..len()`, with `j = min_j + 2 * index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MagLattice {
    n: usize,
    censored: bool,
}

impl MagLattice {
    pub fn new(n: usize, censored: bool) -> Self {
        Self { n, censored }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn censored(&self) -> bool {
        self.censored
    }

    pub fn min_j(&self) -> i64 {
        if self.censored {
            (self.n % 2) as i64
        } else {
            -(self.n as i64)
        }
    }

    pub fn len(&self) -> usize {
        if self.censored {
            self.n / 2 + 1
        } else {
            self.n + 1
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn j(&self, index: usize) -> i64 {
        self.min_j() + 2 * index as i64
    }

    /// Normalized magnetization `j / n`.
    pub fn s(&self, index: usize) -> f64 {
        self.j(index) as f64 / self.n as f64
    }

    pub fn index_of(&self, j: i64) -> Option<usize> {
        let off = j - self.min_j();
        if off < 0 || off % 2 != 0 {
            return None;
        }
        let idx = (off / 2) as usize;
        (idx < self.len()).then_some(idx)
    }

    pub fn top(&self) -> usize {
        self.len() - 1
    }

    /// Smallest lattice index with `s >= value`.
    pub fn ceil_index(&self, value: f64) -> Option<usize> {
        (0..self.len()).find(|&i| self.s(i) >= value - 1e-15)
    }

    /// Largest lattice index with `s <= value`.
    pub fn floor_index(&self, value: f64) -> Option<usize> {
        (0..self.len()).rev().find(|&i| self.s(i) <= value + 1e-15)
    }

    pub fn s_values(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.s(i)).collect()
    }
}

/// Starting state of an experiment. Serialized as its label: `bottom`,
/// `top`, `all-plus`, `all-minus` or a number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Start {
    /// Lowest lattice state (0 or 1/n censored, -1 ordinary).
    Bottom,
    /// Magnetization 1.
    Top,
    AllPlus,
    AllMinus,
    /// A magnetization value, rounded up to the lattice.
    Value(f64),
}

impl Start {
    pub fn resolve(&self, lattice: &MagLattice) -> Result<usize> {
        match *self {
            Start::Bottom => Ok(0),
            Start::Top | Start::AllPlus => Ok(lattice.top()),
            Start::AllMinus => Ok(if lattice.censored() { lattice.top() } else { 0 }),
            Start::Value(s) => {
                if !(-1.0..=1.0).contains(&s) {
                    return Err(Error::InvalidParameter(format!("start magnetization {s} outside [-1, 1]")));
                }
                let s = if lattice.censored() { s.abs() } else { s };
                lattice
                    .ceil_index(s)
                    .ok_or_else(|| Error::InvalidParameter(format!("no lattice state >= {s}")))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            Start::Bottom => "bottom".into(),
            Start::Top => "top".into(),
            Start::AllPlus => "all-plus".into(),
            Start::AllMinus => "all-minus".into(),
            Start::Value(s) => format!("{s}"),
        }
    }
}

impl From<Start> for String {
    fn from(start: Start) -> String {
        start.label()
    }
}

impl TryFrom<String> for Start {
    type Error = Error;

    fn try_from(text: String) -> Result<Self> {
        text.parse()
    }
}

impl std::str::FromStr for Start {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        match text {
            "bottom" => Ok(Start::Bottom),
            "top" => Ok(Start::Top),
            "all-plus" => Ok(Start::AllPlus),
            "all-minus" => Ok(Start::AllMinus),
            other => other
                .parse::<f64>()
                .map(Start::Value)
                .map_err(|_| Error::InvalidParameter(format!("unknown start '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn censored_lattice_minimum() {
        assert_eq!(MagLattice::new(10, true).min_j(), 0);
        assert_eq!(MagLattice::new(11, true).min_j(), 1);
        assert_eq!(MagLattice::new(11, true).len(), 6);
        assert_eq!(MagLattice::new(10, false).len(), 11);
    }

    #[test]
    fn adjacent_states_differ_by_two() {
        for lattice in [MagLattice::new(9, false), MagLattice::new(9, true), MagLattice::new(8, true)] {
            for i in 1..lattice.len() {
                assert_eq!(lattice.j(i) - lattice.j(i - 1), 2);
            }
            assert_eq!(lattice.j(lattice.top()), lattice.n() as i64);
        }
    }

    #[test]
    fn index_round_trip() {
        let l = MagLattice::new(12, false);
        for i in 0..l.len() {
            assert_eq!(l.index_of(l.j(i)), Some(i));
        }
        assert_eq!(l.index_of(1), None);
        assert_eq!(l.index_of(14), None);
    }

    #[test]
    fn value_start_rounds_up() {
        let l = MagLattice::new(10, true);
        assert_eq!(Start::Value(0.25).resolve(&l).unwrap(), 2); // 0.4
        assert_eq!(Start::Value(-0.2).resolve(&l).unwrap(), 1);
        assert_eq!(Start::AllMinus.resolve(&l).unwrap(), l.top());
    }
}
