//! Circuit-parameter optimization: multistart and warm-started Nelder-Mead
//! over the extended key rate, with the preprocessing noise as a final extra
//! coordinate and, for multi-detector parties, a search over the ambiguous
//! outcome binnings.

use diqkd_core::circuit::{Binning, CircuitSpec, ParamRole};
use diqkd_core::metrics::{key_rate, KeyRateReport};
use diqkd_core::{DetectorModel, Error, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::nelder_mead::{nelder_mead_max, NelderMeadSettings};

/// Everything configurable about a circuit optimization run.
#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    pub nm: NelderMeadSettings,
    /// Fresh-circuit restarts.
    pub restarts: usize,
    /// Scale of the warm-start perturbation.
    pub perturbation_scale: f64,
    pub squeezing_range: (f64, f64),
    pub angle_range: (f64, f64),
    pub displacement_range: (f64, f64),
    pub noise_range: (f64, f64),
    /// Force the binning search on or off; `None` searches whenever the
    /// circuit still carries a default table for a multi-detector party.
    pub search_binning: Option<bool>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            nm: NelderMeadSettings::default(),
            restarts: 8,
            perturbation_scale: 0.2,
            squeezing_range: (-1.5, 1.5),
            angle_range: (-std::f64::consts::PI, std::f64::consts::PI),
            displacement_range: (-1.5, 1.5),
            noise_range: (0.0, 0.45),
            search_binning: None,
        }
    }
}

/// A parameter vector with stable slot names; the preprocessing noise rides
/// along as the trailing `noise_p` coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedParams {
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

impl NamedParams {
    pub fn noise(&self) -> f64 {
        *self.values.last().expect("noise coordinate")
    }

    pub fn circuit_params(&self) -> &[f64] {
        &self.values[..self.values.len() - 1]
    }
}

/// Objective value of one start, for the per-start trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StartRecord {
    pub start_index: usize,
    pub objective: f64,
}

/// Result of optimizing one circuit at one detector setting.
#[derive(Debug, Clone)]
pub struct OptimizedCircuit {
    pub circuit: CircuitSpec,
    pub params: NamedParams,
    /// Best extended key rate found, or the dummy value when every start
    /// ended herald-impossible.
    pub objective: f64,
    pub report: Option<KeyRateReport<f64>>,
    pub binning: Binning,
    pub starts: Vec<StartRecord>,
}

/// Binning tables the objective may choose between.
pub fn binning_tables(circuit: &CircuitSpec, cfg: &OptimizerConfig) -> Vec<Binning> {
    let half = circuit.signal_modes / 2;
    let has_multi = half > 1 || circuit.signal_modes - half > 1;
    let is_default =
        circuit.binning == Binning::default_for(half, circuit.signal_modes - half);
    let search = cfg.search_binning.unwrap_or(has_multi && is_default);
    if search {
        Binning::candidates(circuit)
    } else {
        vec![circuit.binning.clone()]
    }
}

/// Extended key rate maximized over the candidate binnings; the trailing
/// coordinate of `z` is the preprocessing noise. Heralding failures and
/// numerical breakdowns map to the dummy objective.
pub fn extended_objective(
    circuit: &CircuitSpec,
    z: &[f64],
    det: &DetectorModel,
    binnings: &[Binning],
    dummy: f64,
) -> f64 {
    match detailed_objective(circuit, z, det, binnings) {
        Ok((value, _, _)) => value,
        Err(_) => dummy,
    }
}

/// As [`extended_objective`], but returning the winning report and binning.
pub fn detailed_objective(
    circuit: &CircuitSpec,
    z: &[f64],
    det: &DetectorModel,
    binnings: &[Binning],
) -> Result<(f64, KeyRateReport<f64>, Binning)> {
    let (phi, rest) = z.split_at(z.len() - 1);
    let noise = rest[0].clamp(0.0, 0.4999);
    let patterns = circuit.evaluate_patterns(phi, det)?;
    let mut best: Option<(f64, KeyRateReport<f64>, Binning)> = None;
    for binning in binnings {
        let behavior = patterns.bin(circuit, binning)?;
        let report = key_rate(&behavior, noise)?;
        let value = report.extended_rate;
        if best.as_ref().map_or(true, |(b, _, _)| value > *b) {
            best = Some((value, report, binning.clone()));
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("no binning candidates".into()))
}

/// Optimize a circuit's parameters (plus preprocessing noise) for one
/// detector model. Fresh circuits run `restarts` random starts; with a warm
/// start three runs are used — the warm point itself (new slots zeroed), one
/// random start, and the warm point perturbed by `perturbation_scale·u` with
/// `u` uniform in `[0, 1]` per surviving coordinate.
pub fn optimize_circuit(
    circuit: &CircuitSpec,
    det: &DetectorModel,
    warm: Option<&NamedParams>,
    cfg: &OptimizerConfig,
    rng: &mut ChaCha8Rng,
) -> Result<OptimizedCircuit> {
    circuit.validate()?;
    let slots = circuit.free_params();
    let binnings = binning_tables(circuit, cfg);

    let names: Vec<String> = slots
        .iter()
        .map(|s| s.name.clone())
        .chain(std::iter::once("noise_p".to_string()))
        .collect();

    let sample = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        let mut z: Vec<f64> = slots
            .iter()
            .map(|s| {
                let (lo, hi) = match s.role {
                    ParamRole::Squeezing => cfg.squeezing_range,
                    ParamRole::Angle => cfg.angle_range,
                    ParamRole::Displacement => cfg.displacement_range,
                };
                rng.gen_range(lo..hi)
            })
            .collect();
        z.push(rng.gen_range(cfg.noise_range.0..cfg.noise_range.1));
        z
    };

    let mut starts: Vec<Vec<f64>> = Vec::new();
    match warm {
        Some(prev) => {
            let mapped: Vec<f64> = names
                .iter()
                .map(|n| {
                    prev.names
                        .iter()
                        .position(|pn| pn == n)
                        .map(|i| prev.values[i])
                        .unwrap_or(0.0)
                })
                .collect();
            starts.push(mapped.clone());
            starts.push(sample(rng));
            let mut perturbed = mapped.clone();
            for (i, name) in names.iter().enumerate() {
                if prev.names.contains(name) {
                    perturbed[i] += cfg.perturbation_scale * rng.gen_range(0.0..1.0);
                }
            }
            starts.push(perturbed);
        }
        None => {
            for _ in 0..cfg.restarts.max(1) {
                starts.push(sample(rng));
            }
        }
    }

    let objective =
        |z: &[f64]| extended_objective(circuit, z, det, &binnings, cfg.nm.dummy_objective);

    let mut trace = Vec::with_capacity(starts.len());
    let mut best: Option<(Vec<f64>, f64, usize)> = None;
    for (start_index, start) in starts.iter().enumerate() {
        let (x, value) = nelder_mead_max(objective, start, &cfg.nm);
        trace.push(StartRecord {
            start_index,
            objective: value,
        });
        // Deterministic merge: objective first, earlier start wins ties.
        if best.as_ref().map_or(true, |(_, b, _)| value > *b) {
            best = Some((x, value, start_index));
        }
    }
    let (z_best, objective_best, _) = best.expect("at least one start");

    match detailed_objective(circuit, &z_best, det, &binnings) {
        Ok((recheck, report, binning)) => {
            if (recheck - objective_best).abs() > 1e-12 {
                return Err(Error::NumericalInstability(format!(
                    "re-evaluation drifted: {objective_best} vs {recheck}"
                )));
            }
            Ok(OptimizedCircuit {
                circuit: circuit.clone(),
                params: NamedParams {
                    names,
                    values: z_best,
                },
                objective: objective_best,
                report: Some(report),
                binning,
                starts: trace,
            })
        }
        Err(_) => Ok(OptimizedCircuit {
            circuit: circuit.clone(),
            params: NamedParams {
                names,
                values: z_best,
            },
            objective: cfg.nm.dummy_objective,
            report: None,
            binning: circuit.binning.clone(),
            starts: trace,
        }),
    }
}
