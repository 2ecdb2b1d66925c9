use crate::error::{Error, Result};
use crate::gaussian::{DetectorModel, QuasiMixture, SymplecticOp};
use crate::metrics::BehaviorTable;

/// Gate vocabulary of circuit documents. `D` is a general displacement with
/// two real parameters, `Dx`/`Dp` are its single-quadrature restrictions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateName {
    D,
    Dx,
    Dp,
    PS,
    S,
    TMS,
    BS,
}

impl GateName {
    pub fn as_str(self) -> &'static str {
        match self {
            GateName::D => "D",
            GateName::Dx => "Dx",
            GateName::Dp => "Dp",
            GateName::PS => "PS",
            GateName::S => "S",
            GateName::TMS => "TMS",
            GateName::BS => "BS",
        }
    }

    pub fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "D" => GateName::D,
            "Dx" => GateName::Dx,
            "Dp" => GateName::Dp,
            "PS" => GateName::PS,
            "S" => GateName::S,
            "TMS" => GateName::TMS,
            "BS" => GateName::BS,
            other => return Err(Error::Parse(format!("unknown gate name `{other}`"))),
        })
    }

    pub fn arity(self) -> usize {
        match self {
            GateName::TMS | GateName::BS => 2,
            _ => 1,
        }
    }

    pub fn param_count(self) -> usize {
        match self {
            GateName::D | GateName::S | GateName::TMS => 2,
            _ => 1,
        }
    }

    pub fn param_roles(self) -> &'static [ParamRole] {
        match self {
            GateName::D => &[ParamRole::Displacement, ParamRole::Displacement],
            GateName::Dx | GateName::Dp => &[ParamRole::Displacement],
            GateName::PS | GateName::BS => &[ParamRole::Angle],
            GateName::S | GateName::TMS => &[ParamRole::Squeezing, ParamRole::Angle],
        }
    }

    /// Whether the gate can populate a vacuum mode it acts on.
    pub(crate) fn populates(self) -> bool {
        !matches!(self, GateName::PS | GateName::BS)
    }
}

/// A gate parameter: either pinned to a value or a named free slot bound
/// later from a flat parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Fixed(f64),
    Free(String),
}

/// One gate of a circuit document. Modes are 0-based here; the text format
/// uses 1-based indices.
#[derive(Debug, Clone, PartialEq)]
pub struct GateSpec {
    pub gate: GateName,
    pub modes: Vec<usize>,
    pub params: Vec<ParamValue>,
}

impl GateSpec {
    pub fn new(gate: GateName, modes: Vec<usize>, params: Vec<ParamValue>) -> Self {
        Self { gate, modes, params }
    }

    /// Same action in the search sense: same gate on the same mode list,
    /// parameters ignored.
    pub(crate) fn same_action(&self, other: &GateSpec) -> bool {
        self.gate == other.gate && self.modes == other.modes
    }

    pub(crate) fn disjoint_modes(&self, other: &GateSpec) -> bool {
        self.modes.iter().all(|m| !other.modes.contains(m))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeraldOutcome {
    Click,
    NoClick,
}

/// A conditioning event during preparation: the detector on `mode` must
/// report `outcome` before the signal modes are released.
#[derive(Debug, Clone, PartialEq)]
pub struct HeraldEvent {
    pub mode: usize,
    pub outcome: HeraldOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn label(self) -> &'static str {
        match self {
            Party::Alice => "alice",
            Party::Bob => "bob",
        }
    }
}

/// Per-party map from click pattern to outcome bit. Index = pattern over the
/// party's modes (LSB = the party's first mode), value ∈ {0, 1}.
#[derive(Debug, Clone, PartialEq)]
pub struct Binning {
    pub alice: Vec<u8>,
    pub bob: Vec<u8>,
}

impl Binning {
    /// The no-click → 0, click → 1 convention for single-detector parties.
    pub fn default_for(alice_modes: usize, bob_modes: usize) -> Self {
        Self {
            alice: default_party_binning(alice_modes),
            bob: default_party_binning(bob_modes),
        }
    }

    /// Candidate binning tables to search over for a circuit. Single-detector
    /// parties have a canonical table; for two-detector parties the single
    /// clicks are unambiguous and the two remaining patterns (no click at
    /// all, both click) take all four 0/1 assignments, giving up to 16
    /// candidates in total.
    pub fn candidates(circuit: &CircuitSpec) -> Vec<Binning> {
        let half = circuit.signal_modes / 2;
        let party = |modes: usize| -> Vec<Vec<u8>> {
            match modes {
                1 => vec![vec![0, 1]],
                2 => {
                    let mut tables = Vec::with_capacity(4);
                    for none in 0..2u8 {
                        for both in 0..2u8 {
                            tables.push(vec![none, 0, 1, both]);
                        }
                    }
                    tables
                }
                k => vec![(0..1usize << k).map(|p| (p.count_ones() & 1) as u8).collect()],
            }
        };
        let mut out = Vec::new();
        for a in party(half) {
            for b in party(circuit.signal_modes - half) {
                out.push(Binning {
                    alice: a.clone(),
                    bob: b,
                });
            }
        }
        out
    }
}

fn default_party_binning(modes: usize) -> Vec<u8> {
    match modes {
        1 => vec![0, 1],
        // Two detectors: single clicks are unambiguous, the both-no-click and
        // both-click patterns default to 0 and are searchable downstream.
        2 => vec![0, 0, 1, 0],
        k => (0..1usize << k).map(|p| (p.count_ones() & 1) as u8).collect(),
    }
}

/// The role a free parameter plays, used to pick sampling ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamRole {
    Squeezing,
    Angle,
    Displacement,
}

/// A named free parameter of a circuit, in declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSlot {
    pub name: String,
    pub role: ParamRole,
}

/// A photonic circuit: preparation gates on `n_modes` modes, heralding
/// conditionings, per-setting measurement branches for the two parties, and
/// outcome binning. The non-heralded modes are the signal modes; the first
/// half (in mode order) belongs to Alice, the second half to Bob.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitSpec {
    pub n_modes: usize,
    pub signal_modes: usize,
    pub preparation: Vec<GateSpec>,
    pub heralding: Vec<HeraldEvent>,
    pub alice: [Vec<GateSpec>; 2],
    pub bob: [Vec<GateSpec>; 3],
    /// When set, each Alice branch ends with a free-amplitude `Dx` on each of
    /// her modes and each Bob branch with a `Dp`, bound after the branch's
    /// listed gates.
    pub baseline_displacements: bool,
    pub binning: Binning,
}

impl CircuitSpec {
    /// An empty circuit: no preparation gates, no measurement gates, heralds
    /// fixed on the trailing modes with the given outcome.
    pub fn empty(
        n_modes: usize,
        signal_modes: usize,
        herald_outcome: HeraldOutcome,
        baseline_displacements: bool,
    ) -> Result<Self> {
        let spec = Self {
            n_modes,
            signal_modes,
            preparation: Vec::new(),
            heralding: (signal_modes..n_modes)
                .map(|mode| HeraldEvent {
                    mode,
                    outcome: herald_outcome,
                })
                .collect(),
            alice: [Vec::new(), Vec::new()],
            bob: [Vec::new(), Vec::new(), Vec::new()],
            baseline_displacements,
            binning: Binning::default_for(signal_modes / 2, signal_modes / 2),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Signal modes in ascending original index.
    pub fn signal_mode_list(&self) -> Vec<usize> {
        (0..self.n_modes)
            .filter(|m| !self.heralding.iter().any(|h| h.mode == *m))
            .collect()
    }

    /// Original mode indices owned by one party.
    pub fn party_modes(&self, party: Party) -> Vec<usize> {
        let signal = self.signal_mode_list();
        let half = self.signal_modes / 2;
        match party {
            Party::Alice => signal[..half].to_vec(),
            Party::Bob => signal[half..].to_vec(),
        }
    }

    pub fn branch(&self, party: Party, setting: usize) -> &Vec<GateSpec> {
        match party {
            Party::Alice => &self.alice[setting],
            Party::Bob => &self.bob[setting],
        }
    }

    pub fn branch_mut(&mut self, party: Party, setting: usize) -> &mut Vec<GateSpec> {
        match party {
            Party::Alice => &mut self.alice[setting],
            Party::Bob => &mut self.bob[setting],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_modes;
        let m = self.signal_modes;
        if n == 0 {
            return Err(Error::Validation("circuit needs at least one mode".into()));
        }
        if m < 2 || m % 2 != 0 {
            return Err(Error::Validation(format!(
                "signal mode count {m} must be a positive even number"
            )));
        }
        if m > n {
            return Err(Error::Validation(format!(
                "signal modes {m} exceed total modes {n}"
            )));
        }
        if self.heralding.len() != n - m {
            return Err(Error::Validation(format!(
                "expected {} heralding events for {n} modes with {m} signals, got {}",
                n - m,
                self.heralding.len()
            )));
        }
        for (i, h) in self.heralding.iter().enumerate() {
            if h.mode >= n {
                return Err(Error::Validation(format!(
                    "heralding mode {} out of range",
                    h.mode
                )));
            }
            if self.heralding[..i].iter().any(|p| p.mode == h.mode) {
                return Err(Error::Validation(format!(
                    "duplicate heralding mode {}",
                    h.mode
                )));
            }
        }
        for gate in &self.preparation {
            validate_gate(gate, n)?;
        }
        for (party, count) in [(Party::Alice, 2usize), (Party::Bob, 3usize)] {
            let owned = self.party_modes(party);
            for setting in 0..count {
                for gate in self.branch(party, setting) {
                    validate_gate(gate, n)?;
                    if let Some(bad) = gate.modes.iter().find(|mm| !owned.contains(mm)) {
                        return Err(Error::Validation(format!(
                            "{}: setting {setting} gate {} touches mode {} outside the party's modes {owned:?}",
                            party.label(),
                            gate.gate.as_str(),
                            bad
                        )));
                    }
                }
            }
        }
        let half = m / 2;
        for (label, table, modes) in [
            ("alice", &self.binning.alice, half),
            ("bob", &self.binning.bob, m - half),
        ] {
            if table.len() != 1 << modes {
                return Err(Error::Validation(format!(
                    "{label} binning table has {} entries, expected {}",
                    table.len(),
                    1 << modes
                )));
            }
            if table.iter().any(|&b| b > 1) {
                return Err(Error::Validation(format!(
                    "{label} binning table contains a value outside {{0, 1}}"
                )));
            }
        }
        // Free-parameter names must be unique.
        let slots = self.free_params();
        for (i, s) in slots.iter().enumerate() {
            if slots[..i].iter().any(|p| p.name == s.name) {
                return Err(Error::Validation(format!(
                    "duplicate free parameter name `{}`",
                    s.name
                )));
            }
        }
        Ok(())
    }

    /// Free parameter slots in declaration order: preparation gates first,
    /// then Alice's settings 0..1, then Bob's 0..2, each branch followed by
    /// its baseline displacement slot(s) when enabled.
    pub fn free_params(&self) -> Vec<ParamSlot> {
        let mut slots = Vec::new();
        let push_gate = |gate: &GateSpec, slots: &mut Vec<ParamSlot>| {
            for (i, p) in gate.params.iter().enumerate() {
                if let ParamValue::Free(name) = p {
                    slots.push(ParamSlot {
                        name: name.clone(),
                        role: gate.gate.param_roles()[i],
                    });
                }
            }
        };
        for gate in &self.preparation {
            push_gate(gate, &mut slots);
        }
        for (party, count) in [(Party::Alice, 2usize), (Party::Bob, 3usize)] {
            for setting in 0..count {
                for gate in self.branch(party, setting) {
                    push_gate(gate, &mut slots);
                }
                if self.baseline_displacements {
                    for (i, _) in self.party_modes(party).iter().enumerate() {
                        let name = if self.party_modes(party).len() == 1 {
                            format!("{}{setting}.disp", &party.label()[..1])
                        } else {
                            format!("{}{setting}.m{i}.disp", &party.label()[..1])
                        };
                        slots.push(ParamSlot {
                            name,
                            role: ParamRole::Displacement,
                        });
                    }
                }
            }
        }
        slots
    }

    /// Pattern distributions for each setting pair, plus the heralding
    /// probability, with free parameters bound from `phi` in declaration
    /// order.
    pub fn evaluate_patterns(
        &self,
        phi: &[f64],
        det: &DetectorModel<f64>,
    ) -> Result<SettingPatterns> {
        let states = self.predetection_states(phi, det)?;
        let mut patterns = Vec::with_capacity(6);
        for state in &states.states {
            patterns.push(state.outcome_probabilities(det)?);
        }
        Ok(SettingPatterns {
            herald_probability: states.herald_probability,
            patterns,
        })
    }

    /// The quasi-mixtures sitting in front of the detectors for each setting
    /// pair `(x, y)` in lexicographic order, after preparation, heralding and
    /// the measurement branches.
    pub fn predetection_states(
        &self,
        phi: &[f64],
        det: &DetectorModel<f64>,
    ) -> Result<PredetectionStates> {
        self.validate()?;
        let bound = self.bind(phi)?;
        let n = self.n_modes;
        let mut state = QuasiMixture::vacuum(n)?;
        for gate in &bound.preparation {
            state = state.apply(&gate.to_op(n)?)?;
        }
        let mut herald_probability = 1.0;
        let mut live: Vec<usize> = (0..n).collect();
        for h in &self.heralding {
            let pos = live
                .iter()
                .position(|&m| m == h.mode)
                .expect("validated heralding mode");
            let (next, p) = match h.outcome {
                HeraldOutcome::Click => state.condition_click(pos, det)?,
                HeraldOutcome::NoClick => state.condition_no_click(pos, det)?,
            };
            state = next;
            herald_probability *= p;
            live.remove(pos);
        }
        // Remaining modes are the signal modes in ascending original order.
        let m = self.signal_modes;
        let mode_pos = |orig: usize| live.iter().position(|&mm| mm == orig).unwrap();
        let mut states = Vec::with_capacity(6);
        for x in 0..2usize {
            for y in 0..3usize {
                let mut s = state.clone();
                for (party, setting, quad) in
                    [(Party::Alice, x, Quadrature::X), (Party::Bob, y, Quadrature::P)]
                {
                    for gate in bound.branch(party, setting) {
                        let mut remapped = gate.clone();
                        remapped.modes = gate.modes.iter().map(|&mm| mode_pos(mm)).collect();
                        s = s.apply(&remapped.to_op(m)?)?;
                    }
                    if self.baseline_displacements {
                        for (i, &orig) in self.party_modes(party).iter().enumerate() {
                            let amount = bound.baseline(party, setting, i);
                            let op = match quad {
                                Quadrature::X => SymplecticOp::displacement(
                                    mode_pos(orig),
                                    amount,
                                    0.0,
                                    m,
                                )?,
                                Quadrature::P => SymplecticOp::displacement(
                                    mode_pos(orig),
                                    0.0,
                                    amount,
                                    m,
                                )?,
                            };
                            s = s.apply(&op)?;
                        }
                    }
                }
                states.push(s);
            }
        }
        Ok(PredetectionStates {
            herald_probability,
            states,
        })
    }

    /// Full evaluation under this circuit's own binning.
    pub fn evaluate(&self, phi: &[f64], det: &DetectorModel<f64>) -> Result<BehaviorTable<f64>> {
        let patterns = self.evaluate_patterns(phi, det)?;
        patterns.bin(self, &self.binning)
    }

    /// Number of free parameter slots (cheaper than [`Self::free_params`]).
    pub fn free_param_count(&self) -> usize {
        let count_free = |gates: &[GateSpec]| {
            gates
                .iter()
                .flat_map(|g| &g.params)
                .filter(|p| matches!(p, ParamValue::Free(_)))
                .count()
        };
        let mut total = count_free(&self.preparation);
        for branch in self.alice.iter().chain(self.bob.iter()) {
            total += count_free(branch);
        }
        if self.baseline_displacements {
            total += 2 * self.party_modes(Party::Alice).len()
                + 3 * self.party_modes(Party::Bob).len();
        }
        total
    }

    fn bind(&self, phi: &[f64]) -> Result<BoundCircuit> {
        let expected = self.free_param_count();
        if phi.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "{} parameters supplied for {expected} free slots",
                phi.len()
            )));
        }
        if let Some(bad) = phi.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite parameter value {bad}"
            )));
        }
        let mut cursor = 0usize;
        let preparation = bind_gates(&self.preparation, phi, &mut cursor);
        let mut alice = [Vec::new(), Vec::new()];
        let mut bob = [Vec::new(), Vec::new(), Vec::new()];
        let mut baselines = Vec::new();
        for (party, count) in [(Party::Alice, 2usize), (Party::Bob, 3usize)] {
            for setting in 0..count {
                let gates = bind_gates(self.branch(party, setting), phi, &mut cursor);
                match party {
                    Party::Alice => alice[setting] = gates,
                    Party::Bob => bob[setting] = gates,
                }
                if self.baseline_displacements {
                    for _ in 0..self.party_modes(party).len() {
                        baselines.push(phi[cursor]);
                        cursor += 1;
                    }
                }
            }
        }
        debug_assert_eq!(cursor, phi.len());
        Ok(BoundCircuit {
            preparation,
            alice,
            bob,
            baselines,
            alice_modes: self.party_modes(Party::Alice).len(),
            bob_modes: self.party_modes(Party::Bob).len(),
        })
    }
}

fn bind_gates(gates: &[GateSpec], phi: &[f64], cursor: &mut usize) -> Vec<ResolvedGate> {
    gates
        .iter()
        .map(|g| {
            let params = g
                .params
                .iter()
                .map(|p| match p {
                    ParamValue::Fixed(v) => *v,
                    ParamValue::Free(_) => {
                        let v = phi[*cursor];
                        *cursor += 1;
                        v
                    }
                })
                .collect();
            ResolvedGate {
                gate: g.gate,
                modes: g.modes.clone(),
                params,
            }
        })
        .collect()
}

fn validate_gate(gate: &GateSpec, n_modes: usize) -> Result<()> {
    if gate.modes.len() != gate.gate.arity() {
        return Err(Error::Validation(format!(
            "gate {} takes {} mode(s), got {:?}",
            gate.gate.as_str(),
            gate.gate.arity(),
            gate.modes
        )));
    }
    for (i, &m) in gate.modes.iter().enumerate() {
        if m >= n_modes {
            return Err(Error::Validation(format!(
                "gate {} references mode {m}, out of range for {n_modes} modes",
                gate.gate.as_str()
            )));
        }
        if gate.modes[..i].contains(&m) {
            return Err(Error::Validation(format!(
                "gate {} has duplicate mode {m}",
                gate.gate.as_str()
            )));
        }
    }
    if gate.params.len() != gate.gate.param_count() {
        return Err(Error::Validation(format!(
            "gate {} takes {} parameter(s), got {}",
            gate.gate.as_str(),
            gate.gate.param_count(),
            gate.params.len()
        )));
    }
    Ok(())
}

enum Quadrature {
    X,
    P,
}

#[derive(Debug, Clone)]
struct ResolvedGate {
    gate: GateName,
    modes: Vec<usize>,
    params: Vec<f64>,
}

impl ResolvedGate {
    fn to_op(&self, n_total: usize) -> Result<SymplecticOp<f64>> {
        match self.gate {
            GateName::D => SymplecticOp::displacement(
                self.modes[0],
                self.params[0],
                self.params[1],
                n_total,
            ),
            GateName::Dx => {
                SymplecticOp::displacement(self.modes[0], self.params[0], 0.0, n_total)
            }
            GateName::Dp => {
                SymplecticOp::displacement(self.modes[0], 0.0, self.params[0], n_total)
            }
            GateName::PS => SymplecticOp::phase_shifter(self.modes[0], self.params[0], n_total),
            GateName::S => {
                SymplecticOp::squeezer(self.modes[0], self.params[0], self.params[1], n_total)
            }
            GateName::TMS => SymplecticOp::two_mode_squeezer(
                self.modes[0],
                self.modes[1],
                self.params[0],
                self.params[1],
                n_total,
            ),
            GateName::BS => SymplecticOp::beamsplitter(
                self.modes[0],
                self.modes[1],
                self.params[0],
                n_total,
            ),
        }
    }
}

struct BoundCircuit {
    preparation: Vec<ResolvedGate>,
    alice: [Vec<ResolvedGate>; 2],
    bob: [Vec<ResolvedGate>; 3],
    baselines: Vec<f64>,
    alice_modes: usize,
    bob_modes: usize,
}

impl BoundCircuit {
    fn branch(&self, party: Party, setting: usize) -> &Vec<ResolvedGate> {
        match party {
            Party::Alice => &self.alice[setting],
            Party::Bob => &self.bob[setting],
        }
    }

    fn baseline(&self, party: Party, setting: usize, mode_idx: usize) -> f64 {
        let offset = match party {
            Party::Alice => setting * self.alice_modes + mode_idx,
            Party::Bob => 2 * self.alice_modes + setting * self.bob_modes + mode_idx,
        };
        self.baselines[offset]
    }
}

/// The six pre-detection quasi-mixtures of a bound circuit, `(x, y)` in
/// lexicographic order.
pub struct PredetectionStates {
    pub herald_probability: f64,
    pub states: Vec<QuasiMixture<f64>>,
}

/// Click-pattern distributions per setting pair. Pattern bit `i` (LSB) refers
/// to the `i`-th signal mode; Alice's modes occupy the low bits.
#[derive(Debug, Clone)]
pub struct SettingPatterns {
    pub herald_probability: f64,
    pub patterns: Vec<Vec<f64>>,
}

impl SettingPatterns {
    /// Bin the patterns into a behavior table.
    pub fn bin(&self, circuit: &CircuitSpec, binning: &Binning) -> Result<BehaviorTable<f64>> {
        let alice_bits = circuit.signal_modes / 2;
        let alice_mask = (1usize << alice_bits) - 1;
        let mut p = [[[[0.0f64; 3]; 2]; 2]; 2];
        for x in 0..2usize {
            for y in 0..3usize {
                for (k, &prob) in self.patterns[x * 3 + y].iter().enumerate() {
                    let a = binning.alice[k & alice_mask] as usize;
                    let b = binning.bob[k >> alice_bits] as usize;
                    p[a][b][x][y] += prob;
                }
            }
        }
        BehaviorTable::from_fn(self.herald_probability, |a, b, x, y| {
            p[a as usize][b as usize][x as usize][y as usize]
        })
    }
}
