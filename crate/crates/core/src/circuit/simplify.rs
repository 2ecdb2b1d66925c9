use crate::circuit::spec::{CircuitSpec, GateSpec, Party};

/// Canonicalize a circuit by removing gates that cannot matter for the
/// search:
///
/// - phase shifters and beamsplitters acting on still-vacuum modes,
/// - a repetition of an action already present when every gate in between
///   commutes with it (gates commute iff their mode sets are disjoint — no
///   other relation is assumed),
/// - repeated actions inside one measurement branch (measurement actions are
///   unique per branch).
///
/// Idempotent; parameters of dropped gates disappear with them.
pub fn simplify(circuit: &CircuitSpec) -> CircuitSpec {
    let mut out = circuit.clone();
    let mut vacuum = vec![true; circuit.n_modes];

    let mut kept: Vec<GateSpec> = Vec::with_capacity(circuit.preparation.len());
    for gate in &circuit.preparation {
        if drops_on_vacuum(gate, &vacuum) || is_commuting_duplicate(&kept, gate) {
            continue;
        }
        mark_populated(gate, &mut vacuum);
        kept.push(gate.clone());
    }
    out.preparation = kept;

    for (party, count) in [(Party::Alice, 2usize), (Party::Bob, 3usize)] {
        for setting in 0..count {
            // Each branch is an alternative continuation of the prepared
            // state, so vacuum tracking restarts from the preparation result.
            let mut branch_vacuum = vacuum.clone();
            let mut kept: Vec<GateSpec> = Vec::new();
            for gate in circuit.branch(party, setting) {
                if drops_on_vacuum(gate, &branch_vacuum)
                    || kept.iter().any(|g| g.same_action(gate))
                {
                    continue;
                }
                mark_populated(gate, &mut branch_vacuum);
                kept.push(gate.clone());
            }
            *out.branch_mut(party, setting) = kept;
        }
    }
    out
}

fn drops_on_vacuum(gate: &GateSpec, vacuum: &[bool]) -> bool {
    if gate.gate.populates() {
        return false;
    }
    gate.modes.iter().all(|&m| vacuum[m])
}

fn mark_populated(gate: &GateSpec, vacuum: &mut [bool]) {
    if gate.gate.populates() {
        for &m in &gate.modes {
            vacuum[m] = false;
        }
    } else {
        // A beamsplitter with at least one populated input populates both
        // outputs; phase shifters change nothing.
        if gate.modes.len() == 2 && gate.modes.iter().any(|&m| !vacuum[m]) {
            for &m in &gate.modes {
                vacuum[m] = false;
            }
        }
    }
}

fn is_commuting_duplicate(kept: &[GateSpec], gate: &GateSpec) -> bool {
    for earlier in kept.iter().rev() {
        if earlier.same_action(gate) {
            return true;
        }
        if !earlier.disjoint_modes(gate) {
            return false;
        }
    }
    false
}
