//! Exact analysis of the magnetization birth-and-death chain, ordinary and
//! censored.

pub mod conductance;
pub mod dist;
pub mod kernel;
pub mod lattice;
pub mod mixing;
pub mod spectral;
pub mod tridiag;

pub use conductance::{conductance_profile, ConductanceProfile, CutSide};
pub use dist::{evolve, evolve_with_stats, moments, stationary, tv_distance, EvolveStats, ProbVector};
pub use kernel::{build_kernel, BirthDeathKernel};
pub use lattice::{MagLattice, Start};
pub use mixing::{t_mix, tv_profile, Column, TvProfile};
pub use spectral::{spectral_gap, spectral_gap_dense, SpectralMethod, SpectralResult};
