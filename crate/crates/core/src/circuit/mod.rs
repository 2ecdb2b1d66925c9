//! Circuit descriptions and their evaluation: preparation gates, heralding
//! events, per-setting measurement branches, constraint simplification,
//! binning, the text format and built-in presets.

pub mod format;
mod presets;
mod simplify;
mod spec;

pub use presets::preset;
pub use simplify::simplify;
pub use spec::{
    Binning, CircuitSpec, GateName, GateSpec, HeraldEvent, HeraldOutcome, ParamRole, ParamSlot,
    ParamValue, Party, PredetectionStates, SettingPatterns,
};
