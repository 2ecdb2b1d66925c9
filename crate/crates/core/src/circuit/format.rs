//! Text format for circuit documents: TOML with 1-based mode indices.
//!
//! ```toml
//! modes = 3
//! signal_modes = 2
//! baseline_displacements = true
//!
//! [[preparation]]
//! gate = "TMS"
//! modes = [1, 2]
//! params = ["tms12.r", "tms12.theta"]
//!
//! [[heralding]]
//! mode = 3
//! outcome = "click"
//!
//! [measurements.alice]
//! 0 = [{ gate = "PS", modes = [1], params = ["a0.ps"] }]
//! 1 = [{ gate = "S", modes = [1], params = ["a1.sms", 0.0] }]
//!
//! [measurements.bob]
//! 0 = []
//! 1 = []
//! 2 = []
//!
//! [binning]
//! alice = [0, 1]
//! bob = [0, 1]
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::circuit::spec::{
    Binning, CircuitSpec, GateName, GateSpec, HeraldEvent, HeraldOutcome, ParamValue,
};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct CircuitDoc {
    modes: usize,
    signal_modes: usize,
    #[serde(default)]
    baseline_displacements: bool,
    #[serde(default)]
    preparation: Vec<GateDoc>,
    #[serde(default)]
    heralding: Vec<HeraldDoc>,
    measurements: MeasurementsDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    binning: Option<BinningDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MeasurementsDoc {
    alice: BTreeMap<String, Vec<GateDoc>>,
    bob: BTreeMap<String, Vec<GateDoc>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct GateDoc {
    gate: String,
    #[serde(default)]
    modes: Vec<usize>,
    #[serde(default)]
    params: Vec<ParamDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum ParamDoc {
    Fixed(f64),
    Free(String),
}

#[derive(Debug, Serialize, Deserialize)]
struct HeraldDoc {
    mode: usize,
    outcome: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct BinningDoc {
    alice: Vec<u8>,
    bob: Vec<u8>,
}

/// Parse a circuit document. Syntax errors keep the TOML line/column
/// diagnostics; semantic errors name the offending field.
pub fn parse(text: &str) -> Result<CircuitSpec> {
    let doc: CircuitDoc = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let spec = doc_to_spec(doc)?;
    spec.validate()?;
    Ok(spec)
}

/// Serialize a circuit document; `parse(serialize(c)) == c`.
pub fn serialize(circuit: &CircuitSpec) -> Result<String> {
    let doc = spec_to_doc(circuit);
    toml::to_string_pretty(&doc).map_err(|e| Error::Parse(e.to_string()))
}

fn doc_to_spec(doc: CircuitDoc) -> Result<CircuitSpec> {
    let to_gate = |g: &GateDoc| -> Result<GateSpec> {
        let gate = GateName::from_str(&g.gate)?;
        let modes = g
            .modes
            .iter()
            .map(|&m| {
                if m == 0 {
                    Err(Error::Parse(format!(
                        "gate {}: mode indices are 1-based",
                        g.gate
                    )))
                } else {
                    Ok(m - 1)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let params = g
            .params
            .iter()
            .map(|p| match p {
                ParamDoc::Fixed(v) => ParamValue::Fixed(*v),
                ParamDoc::Free(name) => ParamValue::Free(name.clone()),
            })
            .collect();
        Ok(GateSpec::new(gate, modes, params))
    };

    let branch = |map: &BTreeMap<String, Vec<GateDoc>>, party: &str, setting: usize| {
        map.get(&setting.to_string())
            .ok_or_else(|| {
                Error::Validation(format!("missing measurement branch ({party}, {setting})"))
            })?
            .iter()
            .map(to_gate)
            .collect::<Result<Vec<_>>>()
    };

    for (map, party, expected) in [
        (&doc.measurements.alice, "alice", 2usize),
        (&doc.measurements.bob, "bob", 3usize),
    ] {
        for key in map.keys() {
            let ok = key
                .parse::<usize>()
                .map(|k| k < expected)
                .unwrap_or(false);
            if !ok {
                return Err(Error::Validation(format!(
                    "unexpected measurement setting ({party}, {key})"
                )));
            }
        }
    }

    let heralding = doc
        .heralding
        .iter()
        .map(|h| {
            let outcome = match h.outcome.as_str() {
                "click" => HeraldOutcome::Click,
                "no-click" => HeraldOutcome::NoClick,
                other => {
                    return Err(Error::Parse(format!(
                        "unknown heralding outcome `{other}` (expected click or no-click)"
                    )))
                }
            };
            if h.mode == 0 {
                return Err(Error::Parse("heralding mode indices are 1-based".into()));
            }
            Ok(HeraldEvent {
                mode: h.mode - 1,
                outcome,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let alice_modes = doc.signal_modes / 2;
    let bob_modes = doc.signal_modes - alice_modes;
    let binning = match doc.binning {
        Some(b) => Binning {
            alice: b.alice,
            bob: b.bob,
        },
        None => Binning::default_for(alice_modes, bob_modes),
    };

    Ok(CircuitSpec {
        n_modes: doc.modes,
        signal_modes: doc.signal_modes,
        preparation: doc
            .preparation
            .iter()
            .map(to_gate)
            .collect::<Result<Vec<_>>>()?,
        heralding,
        alice: [
            branch(&doc.measurements.alice, "alice", 0)?,
            branch(&doc.measurements.alice, "alice", 1)?,
        ],
        bob: [
            branch(&doc.measurements.bob, "bob", 0)?,
            branch(&doc.measurements.bob, "bob", 1)?,
            branch(&doc.measurements.bob, "bob", 2)?,
        ],
        baseline_displacements: doc.baseline_displacements,
        binning,
    })
}

fn spec_to_doc(circuit: &CircuitSpec) -> CircuitDoc {
    let from_gate = |g: &GateSpec| GateDoc {
        gate: g.gate.as_str().to_string(),
        modes: g.modes.iter().map(|m| m + 1).collect(),
        params: g
            .params
            .iter()
            .map(|p| match p {
                ParamValue::Fixed(v) => ParamDoc::Fixed(*v),
                ParamValue::Free(name) => ParamDoc::Free(name.clone()),
            })
            .collect(),
    };
    CircuitDoc {
        modes: circuit.n_modes,
        signal_modes: circuit.signal_modes,
        baseline_displacements: circuit.baseline_displacements,
        preparation: circuit.preparation.iter().map(from_gate).collect(),
        heralding: circuit
            .heralding
            .iter()
            .map(|h| HeraldDoc {
                mode: h.mode + 1,
                outcome: match h.outcome {
                    HeraldOutcome::Click => "click".to_string(),
                    HeraldOutcome::NoClick => "no-click".to_string(),
                },
            })
            .collect(),
        measurements: MeasurementsDoc {
            alice: circuit
                .alice
                .iter()
                .enumerate()
                .map(|(i, b)| (i.to_string(), b.iter().map(from_gate).collect()))
                .collect(),
            bob: circuit
                .bob
                .iter()
                .enumerate()
                .map(|(i, b)| (i.to_string(), b.iter().map(from_gate).collect()))
                .collect(),
        },
        binning: Some(BinningDoc {
            alice: circuit.binning.alice.clone(),
            bob: circuit.binning.bob.clone(),
        }),
    }
}
