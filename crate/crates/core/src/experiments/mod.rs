//! Declarative experiment specs, their execution and CSV output.

pub mod figures;
pub mod row;
pub mod runner;
pub mod spec;

pub use figures::{figure_data, figure_rows, Figure, FigureOptions};
pub use row::{ResultRow, HEADER};
pub use runner::{compute_rows, error_json, exit_code, run_spec};
pub use spec::{ExperimentSpec, Kind};
