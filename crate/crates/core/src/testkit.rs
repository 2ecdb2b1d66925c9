//! Randomized-circuit machinery shared by the cross-check tests and the
//! `oracle-check` command: build a random gate sequence with an optional
//! click herald, run it through both the Gaussian path and the number-basis
//! path, and compare every outcome probability.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fock::FockState;
use crate::gaussian::{DetectorModel, GateKind, QuasiMixture, SymplecticOp};

/// One random circuit of the comparison family: at most 3 modes, at most 6
/// gates with |r| ≤ 1 and |α| ≤ 1, at most one click herald, and possibly
/// gates after the herald on the surviving modes.
#[derive(Debug, Clone)]
pub struct RandomCircuit {
    pub n_modes: usize,
    pub gates: Vec<(GateKind, Vec<f64>, Vec<usize>)>,
    /// Gate position after which the herald fires, and the heralded mode.
    pub herald: Option<(usize, usize)>,
}

/// Result of running one circuit through both simulators.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub herald_probability_gap: f64,
    pub max_pattern_gap: f64,
    pub patterns: usize,
}

pub fn sample_circuit(rng: &mut ChaCha8Rng) -> RandomCircuit {
    let n_modes = rng.gen_range(1..=3usize);
    let n_gates = rng.gen_range(1..=6usize);
    let herald = if n_modes >= 2 && rng.gen_bool(0.5) {
        Some((rng.gen_range(1..=n_gates), rng.gen_range(0..n_modes)))
    } else {
        None
    };
    let mut gates = Vec::with_capacity(n_gates);
    let mut squeeze_budget = 1.6f64;
    for pos in 0..n_gates {
        // Gates after the herald cannot touch the measured-out mode.
        let allowed: Vec<usize> = match herald {
            Some((hpos, hmode)) if pos >= hpos => {
                (0..n_modes).filter(|&m| m != hmode).collect()
            }
            _ => (0..n_modes).collect(),
        };
        let pick = |rng: &mut ChaCha8Rng| allowed[rng.gen_range(0..allowed.len())];
        let pick_two = |rng: &mut ChaCha8Rng| {
            let mut m = allowed.clone();
            m.shuffle(rng);
            m[..2].to_vec()
        };
        let two_mode_ok = allowed.len() >= 2;
        let (kind, params, modes): (GateKind, Vec<f64>, Vec<usize>) = match rng.gen_range(0..5) {
            0 => (
                GateKind::Displacement,
                vec![rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7)],
                vec![pick(rng)],
            ),
            1 => (
                GateKind::PhaseShifter,
                vec![rng.gen_range(-3.1..3.1)],
                vec![pick(rng)],
            ),
            2 => {
                let r = rng.gen_range(-0.8f64..0.8).clamp(-squeeze_budget, squeeze_budget);
                squeeze_budget = (squeeze_budget - r.abs()).max(0.0);
                (
                    GateKind::SingleModeSqueezer,
                    vec![r, rng.gen_range(-3.1..3.1)],
                    vec![pick(rng)],
                )
            }
            3 if two_mode_ok => {
                let r = rng.gen_range(-0.8f64..0.8).clamp(-squeeze_budget, squeeze_budget);
                squeeze_budget = (squeeze_budget - r.abs()).max(0.0);
                (
                    GateKind::TwoModeSqueezer,
                    vec![r, rng.gen_range(-3.1..3.1)],
                    pick_two(rng),
                )
            }
            4 if two_mode_ok => (
                GateKind::Beamsplitter,
                vec![rng.gen_range(-3.1..3.1)],
                pick_two(rng),
            ),
            _ => (
                GateKind::PhaseShifter,
                vec![rng.gen_range(-3.1..3.1)],
                vec![pick(rng)],
            ),
        };
        gates.push((kind, params, modes));
    }
    RandomCircuit {
        n_modes,
        gates,
        herald,
    }
}

/// Run one circuit through both paths. `Err(HeraldImpossible)` and
/// `Err(Truncation)` mark draws the caller should resample.
pub fn compare_paths(
    circuit: &RandomCircuit,
    det: &DetectorModel<f64>,
    cutoff: usize,
) -> Result<Comparison> {
    // Gaussian path, heralding applied in place.
    let mut gauss = QuasiMixture::vacuum(circuit.n_modes)?;
    let mut live: Vec<usize> = (0..circuit.n_modes).collect();
    let mut herald_p_gauss = 1.0;
    let do_herald = |gauss: &mut QuasiMixture<f64>,
                         live: &mut Vec<usize>,
                         herald_p: &mut f64,
                         hmode: usize|
     -> Result<()> {
        let at = live.iter().position(|&m| m == hmode).unwrap();
        let (next, p) = gauss.condition_click(at, det)?;
        *gauss = next;
        *herald_p = p;
        live.remove(at);
        Ok(())
    };
    for (pos, (kind, params, modes)) in circuit.gates.iter().enumerate() {
        if let Some((hpos, hmode)) = circuit.herald {
            if hpos == pos {
                do_herald(&mut gauss, &mut live, &mut herald_p_gauss, hmode)?;
            }
        }
        let mapped: Vec<usize> = modes
            .iter()
            .map(|m| live.iter().position(|l| l == m).expect("mode is live"))
            .collect();
        gauss = gauss.apply(&SymplecticOp::new(*kind, params, &mapped, live.len())?)?;
    }
    if let Some((hpos, hmode)) = circuit.herald {
        if hpos == circuit.gates.len() {
            do_herald(&mut gauss, &mut live, &mut herald_p_gauss, hmode)?;
        }
    }
    // Reject numerically meaningless heralds before comparing.
    if circuit.herald.is_some() && herald_p_gauss < 1e-3 {
        return Err(Error::HeraldImpossible {
            probability: herald_p_gauss,
        });
    }
    let gauss_probs = gauss.outcome_probabilities(det)?;

    // Number-basis path: the herald POVM is diagonal and acts on its own
    // mode, so it commutes with every later gate (those act on other modes);
    // it can therefore be folded into the final joint measurement.
    let mut fock = FockState::vacuum(circuit.n_modes, cutoff)?;
    for (kind, params, modes) in &circuit.gates {
        fock = fock.apply_gate(*kind, params, modes)?;
    }
    let (max_pattern_gap, herald_gap) = match circuit.herald {
        None => {
            let measured: Vec<usize> = (0..circuit.n_modes).collect();
            let probs = fock.pattern_probabilities(det, &measured);
            (max_gap(&gauss_probs, &probs), 0.0)
        }
        Some((_, hmode)) => {
            // Measure the herald mode last; patterns with its click bit set,
            // renormalized by the click probability, are the conditionals.
            let mut measured: Vec<usize> = live.clone();
            measured.push(hmode);
            let joint = fock.pattern_probabilities(det, &measured);
            let m_signal = live.len();
            let herald_bit = 1usize << m_signal;
            let p_click: f64 = joint
                .iter()
                .enumerate()
                .filter(|(k, _)| k & herald_bit != 0)
                .map(|(_, p)| p)
                .sum();
            let conditional: Vec<f64> = (0..1usize << m_signal)
                .map(|k| joint[k | herald_bit] / p_click)
                .collect();
            (
                max_gap(&gauss_probs, &conditional),
                (p_click - herald_p_gauss).abs(),
            )
        }
    };
    Ok(Comparison {
        herald_probability_gap: herald_gap,
        max_pattern_gap,
        patterns: gauss_probs.len(),
    })
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Draw and compare `count` circuits, resampling draws whose herald is too
/// rare or whose truncated basis cannot hold the state. Returns the worst
/// (pattern, herald) gaps seen.
pub fn run_comparison(seed: u64, count: usize, det: &DetectorModel<f64>) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_pattern = 0.0f64;
    let mut worst_herald = 0.0f64;
    let mut done = 0usize;
    let mut attempts = 0usize;
    while done < count {
        attempts += 1;
        if attempts > 50 * count {
            return Err(Error::InvalidArgument(
                "circuit sampler rejected too many draws".into(),
            ));
        }
        let circuit = sample_circuit(&mut rng);
        let cutoff = if circuit.n_modes == 3 { 25 } else { 40 };
        match compare_paths(&circuit, det, cutoff) {
            Ok(cmp) => {
                worst_pattern = worst_pattern.max(cmp.max_pattern_gap);
                worst_herald = worst_herald.max(cmp.herald_probability_gap);
                done += 1;
            }
            Err(Error::HeraldImpossible { .. }) | Err(Error::Truncation { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok((worst_pattern, worst_herald))
}
