//! Exact simulation of Gaussian states under symplectic gates, trace-out,
//! click/no-click detector conditioning and multi-detector outcome
//! statistics, with heralded states represented as signed quasi-mixtures.

mod detector;
mod mixture;
mod op;
mod state;

pub use detector::{DetectorModel, CONDITION_LIMIT};
pub use mixture::{Branch, QuasiMixture, HERALD_EPS, PROB_CLAMP_TOL, PRUNE_EPS, WEIGHT_SUM_TOL};
pub use op::{GateKind, SymplecticOp, SYMPLECTIC_TOL};
pub use state::{symplectic_form, GaussianState, PHYSICALITY_TOL, SYMMETRY_TOL};
