//! Simulation and scoring core for photonic device-independent QKD circuits.
//!
//! The building blocks:
//!
//! - [`gaussian`] — exact Gaussian-formalism simulation of optical circuits:
//!   symplectic gates, detector conditioning and click statistics, with
//!   heralded states as signed quasi-mixtures.
//! - [`fock`] — an independent truncated number-state simulator used to
//!   cross-check the Gaussian path.
//! - [`metrics`] — CHSH score, entropies and the (extended) key rate.
//! - [`circuit`] — circuit descriptions, file format, presets, constraint
//!   simplification and evaluation into behavior tables.
//!
//! The numeric core is generic over [`scalar::Real`]; the aliases below fix
//! `f64`, which is what the rest of the workspace (and every quoted
//! tolerance) uses.

pub mod circuit;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod metrics;
pub mod scalar;
pub mod testkit;

pub use error::{Error, Result};

/// `f64` alias of [`gaussian::GaussianState`].
pub type GaussianState = gaussian::GaussianState<f64>;
/// `f64` alias of [`gaussian::SymplecticOp`].
pub type SymplecticOp = gaussian::SymplecticOp<f64>;
/// `f64` alias of [`gaussian::QuasiMixture`].
pub type QuasiMixture = gaussian::QuasiMixture<f64>;
/// `f64` alias of [`gaussian::DetectorModel`].
pub type DetectorModel = gaussian::DetectorModel<f64>;
/// `f64` alias of [`metrics::BehaviorTable`].
pub type BehaviorTable = metrics::BehaviorTable<f64>;
/// `f64` alias of [`metrics::KeyRateReport`].
pub type KeyRateReport = metrics::KeyRateReport<f64>;
/// `f64` alias of [`fock::FockState`].
pub type FockState = fock::FockState<f64>;
