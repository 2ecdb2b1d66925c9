use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gaussian::state::GaussianState;
use crate::scalar::Real;

/// Condition-number guard for the factored detection matrix.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Non-photon-number-resolving detector: only click / no-click, with
/// efficiency `η` and an independent dark-count probability per detection.
///
/// The no-click POVM element is `(1 - p_dc)·(1-η)^{a†a}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel<T: Real> {
    efficiency: T,
    dark_count_prob: T,
}

impl<T: Real> DetectorModel<T> {
    pub fn new(efficiency: T, dark_count_prob: T) -> Result<Self> {
        for (name, v) in [("efficiency", efficiency), ("dark-count probability", dark_count_prob)] {
            if !v.is_finite() || v < T::zero() || v > T::one() {
                return Err(Error::InvalidArgument(format!(
                    "{name} must lie in [0, 1], got {}",
                    v.as_f64()
                )));
            }
        }
        Ok(Self {
            efficiency,
            dark_count_prob,
        })
    }

    /// Unit efficiency, no dark counts.
    pub fn ideal() -> Self {
        Self {
            efficiency: T::one(),
            dark_count_prob: T::zero(),
        }
    }

    pub fn efficiency(&self) -> T {
        self.efficiency
    }

    pub fn dark_count_prob(&self) -> T {
        self.dark_count_prob
    }

    /// `4η/(2-η)`: the quadrature coupling of the no-click POVM.
    pub(crate) fn coupling(&self) -> T {
        let two = T::lit(2.0);
        T::lit(4.0) * self.efficiency / (two - self.efficiency)
    }

    /// `2/(2-η)`: the per-detector prefactor of the no-click expectation.
    pub(crate) fn prefactor(&self) -> T {
        let two = T::lit(2.0);
        two / (two - self.efficiency)
    }

    /// `1 - p_dc`, the dark-count scaling of every no-click factor.
    pub(crate) fn no_dark(&self) -> T {
        T::one() - self.dark_count_prob
    }
}

/// Cholesky factorization of `A = I + g·Σ[S,S]` for a measured mode set `S`.
///
/// Everything the detector formulas need reduces to solves against this
/// matrix: `det(Σ)·det(Σ⁻¹+O) = det(I+ΣO)` restricted to the measured block,
/// and the exponent operator `Σ⁻¹ - Σ⁻¹(Σ⁻¹+O)⁻¹Σ⁻¹` equals `O(I+ΣO)⁻¹`.
/// No explicit inverse of `Σ` is ever formed.
pub(crate) struct MeasuredBlock<T: Real> {
    modes: Vec<usize>,
    coupling: T,
    chol: Cholesky<T, nalgebra::Dyn>,
    mu_block: DVector<T>,
}

impl<T: Real> MeasuredBlock<T> {
    pub(crate) fn new(state: &GaussianState<T>, modes: &[usize], coupling: T) -> Result<Self> {
        let coords: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let k = coords.len();
        let sigma = state.sigma();
        let mut a = DMatrix::zeros(k, k);
        let mut row_sum_max = 0.0f64;
        for i in 0..k {
            let mut row_sum = 0.0f64;
            for j in 0..k {
                let mut v = coupling * sigma[(coords[i], coords[j])];
                if i == j {
                    v += T::one();
                }
                a[(i, j)] = v;
                row_sum += v.abs().as_f64();
            }
            row_sum_max = row_sum_max.max(row_sum);
        }
        // A ⪰ I, so the row-sum norm bounds the condition number.
        if row_sum_max > CONDITION_LIMIT {
            return Err(Error::NumericalInstability(format!(
                "detection matrix condition estimate {row_sum_max:.3e} exceeds {CONDITION_LIMIT:.1e}"
            )));
        }
        let chol = Cholesky::new(a).ok_or_else(|| {
            Error::NumericalInstability("detection matrix is not positive definite".into())
        })?;
        let mu_block = DVector::from_fn(k, |i, _| state.mu()[coords[i]]);
        Ok(Self {
            modes: modes.to_vec(),
            coupling,
            chol,
            mu_block,
        })
    }

    /// `exp(-g·μ_Sᵀ A⁻¹ μ_S / 2) / √det A`, the geometry-dependent part of a
    /// joint no-click expectation on `S`.
    pub(crate) fn no_click_weight(&self) -> T {
        if self.modes.is_empty() {
            return T::one();
        }
        let solved = self.chol.solve(&self.mu_block);
        let quad = self.coupling * self.mu_block.dot(&solved);
        let mut ln_det = T::zero();
        let l = self.chol.l_dirty();
        for i in 0..l.nrows() {
            ln_det += l[(i, i)].ln();
        }
        (-quad * T::lit(0.5) - ln_det).exp()
    }

    /// The state conditioned on no-click at the (single) measured mode, with
    /// that mode traced out:
    /// `μ' = TR[μ - g·Σ[:,S] A⁻¹ μ_S]`, `Σ' = TR[Σ - g·Σ[:,S] A⁻¹ Σ[S,:]]`.
    pub(crate) fn conditioned_state(&self, state: &GaussianState<T>) -> Result<GaussianState<T>> {
        debug_assert_eq!(self.modes.len(), 1);
        let mode = self.modes[0];
        let coords = [2 * mode, 2 * mode + 1];
        let dim = state.dim();
        let sigma = state.sigma();
        let sigma_cols = DMatrix::from_fn(dim, 2, |i, j| sigma[(i, coords[j])]);
        let solved_mu = self.chol.solve(&self.mu_block);
        let mu = state.mu() - &sigma_cols * (solved_mu * self.coupling);
        let solved_sigma = self.chol.solve(&sigma_cols.transpose());
        let sigma_new = sigma - &sigma_cols * (solved_sigma * self.coupling);
        GaussianState::from_parts_symmetrized(mu, sigma_new).trace_out(mode)
    }
}

/// Clamp a probability into `[0, 1]` when it lies within `tol` of the range;
/// anything further out signals a simulation inconsistency.
pub(crate) fn clamp_probability<T: Real>(p: T, tol: f64) -> Result<T> {
    let t = T::lit(tol);
    if p < -t || p > T::one() + t {
        return Err(Error::NumericalInstability(format!(
            "probability {:.6e} outside [0, 1] beyond tolerance {tol:.1e}",
            p.as_f64()
        )));
    }
    Ok(p.clamp(T::zero(), T::one()))
}
