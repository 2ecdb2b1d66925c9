//! Derivative-free circuit-parameter optimization and the detector-efficiency
//! sweep harness.

pub mod nelder_mead;
pub mod optimize;
pub mod sweep;

pub use nelder_mead::{nelder_mead_max, NelderMeadSettings};
pub use optimize::{
    binning_tables, detailed_objective, extended_objective, optimize_circuit, NamedParams,
    OptimizedCircuit, OptimizerConfig, StartRecord,
};
pub use sweep::{efficiency_step, efficiency_sweep, SweepRow, SweepSchedule};
