//! Monte Carlo simulation of the spin dynamics and of the magnetization chain.

pub mod coupling;
pub mod hitting;
pub mod rng;
pub mod spins;
pub mod trajectory;
pub mod two_coord;

pub use coupling::{mag_coupling_coalescence, monotone_pair_step};
pub use hitting::hitting_time;
pub use rng::{replica_rng, SimRng};
pub use spins::{step, AgreementCounter, FlipTable, SpinConfig, UpdateDraw};
pub use trajectory::{run, standard_thresholds, Direction, RecordSpec, Threshold, TrajectoryRecord};
pub use two_coord::{two_coord_experiment, TwoCoordStats};
