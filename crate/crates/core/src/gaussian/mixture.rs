use crate::error::{Error, Result};
use crate::gaussian::detector::{clamp_probability, DetectorModel, MeasuredBlock};
use crate::gaussian::op::SymplecticOp;
use crate::gaussian::state::GaussianState;
use crate::scalar::Real;

/// Tolerance on the branch-weight sum of a quasi-mixture.
pub const WEIGHT_SUM_TOL: f64 = 1e-10;
/// Heralding outcomes below this probability are treated as impossible.
pub const HERALD_EPS: f64 = 1e-12;
/// Branches with `|w|` below this are dropped after renormalization.
pub const PRUNE_EPS: f64 = 1e-14;
/// Probabilities may be clamped into `[0, 1]` from at most this far outside.
pub const PROB_CLAMP_TOL: f64 = 1e-9;

/// One signed component of a quasi-mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch<T: Real> {
    pub weight: T,
    pub state: GaussianState<T>,
}

/// A signed-weight combination of Gaussian states. Weights sum to one but may
/// individually be negative; each click conditioning doubles the branch count,
/// which keeps heralded (non-Gaussian) states exactly representable.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiMixture<T: Real> {
    branches: Vec<Branch<T>>,
}

impl<T: Real> QuasiMixture<T> {
    /// The n-mode vacuum as a single unit-weight branch.
    pub fn vacuum(n_modes: usize) -> Result<Self> {
        Ok(Self::from_state(GaussianState::vacuum(n_modes)?))
    }

    pub fn from_state(state: GaussianState<T>) -> Self {
        Self {
            branches: vec![Branch {
                weight: T::one(),
                state,
            }],
        }
    }

    pub fn from_branches(branches: Vec<Branch<T>>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::InvalidArgument("empty quasi-mixture".into()));
        }
        let n = branches[0].state.n_modes();
        if branches.iter().any(|b| b.state.n_modes() != n) {
            return Err(Error::InvalidArgument(
                "quasi-mixture branches disagree on mode count".into(),
            ));
        }
        let mix = Self { branches };
        let sum = mix.weight_sum().as_f64();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidArgument(format!(
                "quasi-mixture weights sum to {sum}, expected 1"
            )));
        }
        Ok(mix)
    }

    pub fn n_modes(&self) -> usize {
        self.branches[0].state.n_modes()
    }

    pub fn branches(&self) -> &[Branch<T>] {
        &self.branches
    }

    pub fn weight_sum(&self) -> T {
        self.branches
            .iter()
            .fold(T::zero(), |acc, b| acc + b.weight)
    }

    /// Apply a Gaussian operation branch by branch; weights are unchanged.
    pub fn apply(&self, op: &SymplecticOp<T>) -> Result<Self> {
        if op.n_modes() != self.n_modes() {
            return Err(Error::InvalidArgument(format!(
                "operation on {} modes applied to a {}-mode mixture",
                op.n_modes(),
                self.n_modes()
            )));
        }
        let branches = self
            .branches
            .iter()
            .map(|b| {
                Ok(Branch {
                    weight: b.weight,
                    state: op.apply(&b.state)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { branches })
    }

    /// Discard mode `mode` from every branch; weights are unchanged.
    pub fn trace_out(&self, mode: usize) -> Result<Self> {
        let branches = self
            .branches
            .iter()
            .map(|b| {
                Ok(Branch {
                    weight: b.weight,
                    state: b.state.trace_out(mode)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { branches })
    }

    /// Probability that a detector on `mode` reports no click, including the
    /// dark-count factor `1 - p_dc`.
    pub fn no_click_probability(&self, mode: usize, det: &DetectorModel<T>) -> Result<T> {
        self.check_mode(mode)?;
        let mut p = T::zero();
        for b in &self.branches {
            let block = MeasuredBlock::new(&b.state, &[mode], det.coupling())?;
            p += b.weight * det.prefactor() * block.no_click_weight();
        }
        clamp_probability(p * det.no_dark(), PROB_CLAMP_TOL)
    }

    /// Condition on a no-click outcome at `mode`. Returns the conditioned
    /// mixture on the remaining modes and the outcome probability.
    pub fn condition_no_click(
        &self,
        mode: usize,
        det: &DetectorModel<T>,
    ) -> Result<(Self, T)> {
        self.check_mode(mode)?;
        if self.n_modes() < 2 {
            return Err(Error::InvalidArgument(
                "conditioning needs at least two modes".into(),
            ));
        }
        let mut per_branch = Vec::with_capacity(self.branches.len());
        let mut total = T::zero();
        for b in &self.branches {
            let block = MeasuredBlock::new(&b.state, &[mode], det.coupling())?;
            let q = det.no_dark() * det.prefactor() * block.no_click_weight();
            total += b.weight * q;
            per_branch.push((q, block));
        }
        let total = clamp_probability(total, PROB_CLAMP_TOL)?;
        if total.as_f64() <= HERALD_EPS {
            return Err(Error::HeraldImpossible {
                probability: total.as_f64(),
            });
        }
        let mut branches = Vec::with_capacity(self.branches.len());
        for (b, (q, block)) in self.branches.iter().zip(per_branch.iter()) {
            branches.push(Branch {
                weight: b.weight * *q / total,
                state: block.conditioned_state(&b.state)?,
            });
        }
        let mut out = Self { branches };
        out.prune();
        Ok((out, total))
    }

    /// Condition on a click outcome at `mode`. Every branch splits into a
    /// traced-out part and a negatively weighted no-click part, so the branch
    /// count doubles (before pruning).
    pub fn condition_click(&self, mode: usize, det: &DetectorModel<T>) -> Result<(Self, T)> {
        self.check_mode(mode)?;
        if self.n_modes() < 2 {
            return Err(Error::InvalidArgument(
                "conditioning needs at least two modes".into(),
            ));
        }
        let mut per_branch = Vec::with_capacity(self.branches.len());
        let mut total_no_click = T::zero();
        for b in &self.branches {
            let block = MeasuredBlock::new(&b.state, &[mode], det.coupling())?;
            let q = det.no_dark() * det.prefactor() * block.no_click_weight();
            total_no_click += b.weight * q;
            per_branch.push((q, block));
        }
        let total_no_click = clamp_probability(total_no_click, PROB_CLAMP_TOL)?;
        let p_click = T::one() - total_no_click;
        if p_click.as_f64() <= HERALD_EPS {
            return Err(Error::HeraldImpossible {
                probability: p_click.as_f64(),
            });
        }
        let mut branches = Vec::with_capacity(2 * self.branches.len());
        for (b, (q, block)) in self.branches.iter().zip(per_branch.iter()) {
            branches.push(Branch {
                weight: b.weight / p_click,
                state: b.state.trace_out(mode)?,
            });
            branches.push(Branch {
                weight: -b.weight * *q / p_click,
                state: block.conditioned_state(&b.state)?,
            });
        }
        let mut out = Self { branches };
        out.prune();
        Ok((out, p_click))
    }

    /// Joint click-pattern distribution when every mode is read out by an
    /// identical detector. Pattern `k` uses bit `i` (LSB = mode 0) for a click
    /// on mode `i`; the result has length `2^m` and sums to one.
    ///
    /// Dark counts scale each no-click factor by `1 - p_dc`; patterns then
    /// follow from inclusion–exclusion over the forced no-click sets.
    pub fn outcome_probabilities(&self, det: &DetectorModel<T>) -> Result<Vec<T>> {
        let m = self.n_modes();
        let n_patterns = 1usize << m;
        // ⟨ô_ℓ⟩ for every forced-no-click set ℓ, mixed over branches.
        let mut o = vec![T::zero(); n_patterns];
        for b in &self.branches {
            for (ell, slot) in o.iter_mut().enumerate() {
                let modes: Vec<usize> = (0..m).filter(|i| ell >> i & 1 == 1).collect();
                let block = MeasuredBlock::new(&b.state, &modes, det.coupling())?;
                let factor = pow_int(det.no_dark() * det.prefactor(), modes.len())
                    * block.no_click_weight();
                *slot += b.weight * factor;
            }
        }
        let mut probs = Vec::with_capacity(n_patterns);
        for k in 0..n_patterns {
            let forced = !k & (n_patterns - 1);
            let mut p = T::zero();
            // Sum over subsets of the clicked positions.
            let mut sub = k;
            loop {
                let term = o[forced | sub];
                if (sub.count_ones() & 1) == 0 {
                    p += term;
                } else {
                    p -= term;
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & k;
            }
            probs.push(clamp_probability(p, PROB_CLAMP_TOL)?);
        }
        Ok(probs)
    }

    /// Drop branches whose weight is negligible at the probability tolerances
    /// used throughout.
    fn prune(&mut self) {
        let eps = T::lit(PRUNE_EPS);
        if self.branches.len() > 1 {
            self.branches.retain(|b| b.weight.abs() > eps);
        }
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.n_modes() {
            return Err(Error::InvalidArgument(format!(
                "mode {mode} out of range for {} modes",
                self.n_modes()
            )));
        }
        Ok(())
    }
}

fn pow_int<T: Real>(base: T, exp: usize) -> T {
    let mut acc = T::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}
