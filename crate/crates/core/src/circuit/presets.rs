use crate::circuit::spec::{
    Binning, CircuitSpec, GateName, GateSpec, HeraldEvent, HeraldOutcome, ParamValue,
};
use crate::error::{Error, Result};

fn free(name: &str) -> ParamValue {
    ParamValue::Free(name.to_string())
}

fn gate(gate: GateName, modes: &[usize], params: Vec<ParamValue>) -> GateSpec {
    GateSpec::new(gate, modes.to_vec(), params)
}

/// Built-in circuit topologies with unbound parameter slots.
///
/// Accepted names: `reference` (`reference_fig1`), `high_rate`
/// (`discovered_fig2`), `loss_tolerant` (`robust_fig3`).
pub fn preset(name: &str) -> Result<CircuitSpec> {
    let circuit = match name {
        "reference" | "reference_fig1" => reference(),
        "high_rate" | "discovered_fig2" => high_rate(),
        "loss_tolerant" | "robust_fig3" => loss_tolerant(),
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown preset `{other}`; expected reference, high_rate or loss_tolerant"
            )))
        }
    };
    circuit.validate()?;
    Ok(circuit)
}

/// Photon-pair setup: four modes pumped pairwise by two-mode squeezers, each
/// party measuring its two modes through a relative phase and a beamsplitter
/// with two detectors. Outcome binning is an explicit table; the two
/// ambiguous patterns per party (no click at all, both click) are meant to be
/// searched by the optimization harness.
fn reference() -> CircuitSpec {
    let mut alice: [Vec<GateSpec>; 2] = Default::default();
    for (x, branch) in alice.iter_mut().enumerate() {
        *branch = vec![
            gate(GateName::PS, &[0], vec![free(&format!("a{x}.ps"))]),
            gate(GateName::BS, &[0, 1], vec![free(&format!("a{x}.bs"))]),
        ];
    }
    let mut bob: [Vec<GateSpec>; 3] = Default::default();
    for (y, branch) in bob.iter_mut().enumerate() {
        *branch = vec![
            gate(GateName::PS, &[2], vec![free(&format!("b{y}.ps"))]),
            gate(GateName::BS, &[2, 3], vec![free(&format!("b{y}.bs"))]),
        ];
    }
    CircuitSpec {
        n_modes: 4,
        signal_modes: 4,
        preparation: vec![
            gate(
                GateName::TMS,
                &[0, 2],
                vec![free("tms_a.r"), ParamValue::Fixed(0.0)],
            ),
            gate(
                GateName::TMS,
                &[1, 3],
                vec![free("tms_b.r"), ParamValue::Fixed(0.0)],
            ),
        ],
        heralding: Vec::new(),
        alice,
        bob,
        baseline_displacements: false,
        binning: Binning::default_for(2, 2),
    }
}

/// Three-mode setup found when maximizing the lossless key rate: three
/// pairwise two-mode squeezers and a single-mode squeezer on mode 2, the
/// third mode heralded on a click. Alice chooses between a phase shifter and
/// a squeezer, Bob squeezes on his middle setting; every branch ends in the
/// baseline displacement.
fn high_rate() -> CircuitSpec {
    CircuitSpec {
        n_modes: 3,
        signal_modes: 2,
        preparation: vec![
            gate(
                GateName::TMS,
                &[0, 1],
                vec![free("tms12.r"), free("tms12.theta")],
            ),
            gate(
                GateName::TMS,
                &[1, 2],
                vec![free("tms23.r"), free("tms23.theta")],
            ),
            gate(
                GateName::TMS,
                &[0, 2],
                vec![free("tms13.r"), free("tms13.theta")],
            ),
            gate(GateName::S, &[1], vec![free("sms2.r"), free("sms2.theta")]),
        ],
        heralding: vec![HeraldEvent {
            mode: 2,
            outcome: HeraldOutcome::Click,
        }],
        alice: [
            vec![gate(GateName::PS, &[0], vec![free("a0.ps")])],
            vec![gate(
                GateName::S,
                &[0],
                vec![free("a1.sms"), ParamValue::Fixed(0.0)],
            )],
        ],
        bob: [
            Vec::new(),
            vec![gate(
                GateName::S,
                &[1],
                vec![free("b1.sms"), ParamValue::Fixed(0.0)],
            )],
            Vec::new(),
        ],
        baseline_displacements: true,
        binning: Binning::default_for(1, 1),
    }
}

/// Two-mode setup with the highest loss tolerance: one two-mode squeezer,
/// Alice optionally squeezing on her second setting, displacements otherwise.
fn loss_tolerant() -> CircuitSpec {
    CircuitSpec {
        n_modes: 2,
        signal_modes: 2,
        preparation: vec![gate(
            GateName::TMS,
            &[0, 1],
            vec![free("tms.r"), free("tms.theta")],
        )],
        heralding: Vec::new(),
        alice: [
            Vec::new(),
            vec![gate(
                GateName::S,
                &[0],
                vec![free("a1.sms"), ParamValue::Fixed(0.0)],
            )],
        ],
        bob: [Vec::new(), Vec::new(), Vec::new()],
        baseline_displacements: true,
        binning: Binning::default_for(1, 1),
    }
}
