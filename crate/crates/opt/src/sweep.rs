//! Detector-efficiency sweep: optimize at unit efficiency, then walk the
//! efficiency down with warm-started re-optimizations until the key rate
//! falls below a threshold.

use diqkd_core::circuit::CircuitSpec;
use diqkd_core::{DetectorModel, Result};
use rand_chacha::ChaCha8Rng;

use crate::optimize::{optimize_circuit, NamedParams, OptimizedCircuit, OptimizerConfig};

/// One recorded sweep point (rate at or above the threshold).
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub loss: f64,
    pub efficiency: f64,
    pub key_rate: f64,
    pub noise_p: f64,
    pub params: Vec<f64>,
}

/// Result of an efficiency sweep.
#[derive(Debug, Clone)]
pub struct SweepSchedule {
    pub threshold: f64,
    pub param_names: Vec<String>,
    pub rows: Vec<SweepRow>,
    /// Smallest efficiency whose optimized rate still met the threshold;
    /// `None` when the circuit already fails at unit efficiency.
    pub eta_min: Option<f64>,
}

/// Efficiency decrement from the current rate:
/// `s = max(2·10^⌊log₁₀(r̃)-1⌋, 1e-3)`.
pub fn efficiency_step(rate: f64) -> f64 {
    if rate <= 0.0 {
        return 1e-3;
    }
    (2.0 * 10f64.powi((rate.log10() - 1.0).floor() as i32)).max(1e-3)
}

/// Sweep a circuit from unit efficiency down, warm-starting each
/// re-optimization from the previous optimum, stopping when the optimized
/// rate drops below `threshold`. Dark counts are held fixed across the sweep.
pub fn efficiency_sweep(
    circuit: &CircuitSpec,
    dark_counts: f64,
    threshold: f64,
    cfg: &OptimizerConfig,
    rng: &mut ChaCha8Rng,
) -> Result<SweepSchedule> {
    let mut schedule = SweepSchedule {
        threshold,
        param_names: Vec::new(),
        rows: Vec::new(),
        eta_min: None,
    };
    let mut eta = 1.0f64;
    let det = DetectorModel::new(eta, dark_counts)?;
    let mut current = optimize_circuit(circuit, &det, None, cfg, rng)?;
    schedule.param_names = current.params.names.clone();
    if current.objective < threshold {
        log::warn!(
            "circuit stays below threshold {threshold:.3e} already at unit efficiency \
             (best {:.3e}); empty sweep",
            current.objective
        );
        return Ok(schedule);
    }

    loop {
        record(&mut schedule, eta, &current);
        schedule.eta_min = Some(eta);
        let step = efficiency_step(current.objective);
        let next_eta = eta - step;
        if next_eta <= 0.0 {
            break;
        }
        let det = DetectorModel::new(next_eta, dark_counts)?;
        let warm: NamedParams = current.params.clone();
        let next = optimize_circuit(circuit, &det, Some(&warm), cfg, rng)?;
        if next.objective < threshold {
            break;
        }
        eta = next_eta;
        current = next;
    }
    Ok(schedule)
}

fn record(schedule: &mut SweepSchedule, eta: f64, opt: &OptimizedCircuit) {
    schedule.rows.push(SweepRow {
        loss: 1.0 - eta,
        efficiency: eta,
        key_rate: opt.objective,
        noise_p: opt.params.noise().clamp(0.0, 0.4999),
        params: opt.params.circuit_params().to_vec(),
    });
}

impl SweepSchedule {
    /// CSV per the sweep interface: `loss,efficiency,key_rate,noise_p,
    /// param_1,...,param_k`, floats at 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("loss,efficiency,key_rate,noise_p");
        for i in 1..=self.param_names.len().saturating_sub(1) {
            out.push_str(&format!(",param_{i}"));
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                row.loss, row.efficiency, row.key_rate, row.noise_p
            ));
            for p in &row.params {
                out.push_str(&format!(",{p:.16e}"));
            }
            out.push('\n');
        }
        out
    }

    /// Linear interpolation of `ln rate` against efficiency; rows must cover
    /// the query point.
    pub fn log_rate_at(&self, eta: f64) -> Option<f64> {
        let mut pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|r| r.key_rate > 0.0)
            .map(|r| (r.efficiency, r.key_rate.ln()))
            .collect();
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        if pts.len() < 2 || eta < pts[0].0 || eta > pts[pts.len() - 1].0 {
            return None;
        }
        let idx = pts.partition_point(|(e, _)| *e < eta).clamp(1, pts.len() - 1);
        let (e0, l0) = pts[idx - 1];
        let (e1, l1) = pts[idx];
        if (e1 - e0).abs() < 1e-15 {
            return Some(l0);
        }
        Some(l0 + (l1 - l0) * (eta - e0) / (e1 - e0))
    }

    /// Smallest efficiency at which the interpolated rate reaches `rate`.
    pub fn efficiency_for_rate(&self, rate: f64) -> Option<f64> {
        let target = rate.ln();
        let mut pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|r| r.key_rate > 0.0)
            .map(|r| (r.efficiency, r.key_rate.ln()))
            .collect();
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for pair in pts.windows(2) {
            let (e0, l0) = pair[0];
            let (e1, l1) = pair[1];
            if (l0 - target) * (l1 - target) <= 0.0 && (l1 - l0).abs() > 0.0 {
                return Some(e0 + (e1 - e0) * (target - l0) / (l1 - l0));
            }
        }
        None
    }
}
