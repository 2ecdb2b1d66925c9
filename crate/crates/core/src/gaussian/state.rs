use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tolerance used when re-symmetrizing covariance matrices.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Eigenvalue tolerance for the physicality check `Σ + iΩ/4 ⪰ 0`.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// A Gaussian state of `n` bosonic modes, stored as the mean vector and the
/// symmetrized covariance matrix of the quadratures, ordered
/// `(x₁, p₁, …, xₙ, pₙ)` with `[x, p] = i/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState<T: Real> {
    mu: DVector<T>,
    sigma: DMatrix<T>,
}

impl<T: Real> GaussianState<T> {
    /// The n-mode vacuum: zero means, covariance `(1/4)·I`.
    pub fn vacuum(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidArgument(
                "a state needs at least one mode".into(),
            ));
        }
        let dim = 2 * n_modes;
        Ok(Self {
            mu: DVector::zeros(dim),
            sigma: DMatrix::identity(dim, dim) * T::lit(0.25),
        })
    }

    /// Build a state from raw moments. `sigma` must be square, of even
    /// dimension matching `mu`, and symmetric to within [`SYMMETRY_TOL`];
    /// it is re-symmetrized on construction.
    pub fn from_moments(mu: DVector<T>, sigma: DMatrix<T>) -> Result<Self> {
        let dim = mu.len();
        if dim == 0 || dim % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "mean vector length {dim} is not twice a positive mode count"
            )));
        }
        if sigma.nrows() != dim || sigma.ncols() != dim {
            return Err(Error::InvalidArgument(format!(
                "covariance is {}x{}, expected {dim}x{dim}",
                sigma.nrows(),
                sigma.ncols()
            )));
        }
        let tol = T::lit(SYMMETRY_TOL);
        for i in 0..dim {
            for j in (i + 1)..dim {
                if (sigma[(i, j)] - sigma[(j, i)]).abs() > tol {
                    return Err(Error::InvalidArgument(format!(
                        "covariance asymmetric at ({i},{j}): {} vs {}",
                        sigma[(i, j)].as_f64(),
                        sigma[(j, i)].as_f64()
                    )));
                }
            }
        }
        let mut state = Self { mu, sigma };
        state.symmetrize();
        Ok(state)
    }

    pub fn n_modes(&self) -> usize {
        self.mu.len() / 2
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &DVector<T> {
        &self.mu
    }

    pub fn sigma(&self) -> &DMatrix<T> {
        &self.sigma
    }

    /// Replace `Σ` by `(Σ + Σᵀ)/2`.
    pub(crate) fn symmetrize(&mut self) {
        let half = T::lit(0.5);
        let dim = self.sigma.nrows();
        for i in 0..dim {
            for j in (i + 1)..dim {
                let s = (self.sigma[(i, j)] + self.sigma[(j, i)]) * half;
                self.sigma[(i, j)] = s;
                self.sigma[(j, i)] = s;
            }
        }
    }

    pub(crate) fn from_parts_symmetrized(mu: DVector<T>, sigma: DMatrix<T>) -> Self {
        let mut state = Self { mu, sigma };
        state.symmetrize();
        state
    }

    /// Drop mode `mode` (0-based): remove its two quadrature entries from `μ`
    /// and the matching rows/columns of `Σ`.
    pub fn trace_out(&self, mode: usize) -> Result<Self> {
        let n = self.n_modes();
        if mode >= n {
            return Err(Error::InvalidArgument(format!(
                "mode {mode} out of range for {n} modes"
            )));
        }
        if n == 1 {
            return Err(Error::InvalidArgument(
                "cannot trace out the last remaining mode".into(),
            ));
        }
        let keep: Vec<usize> = (0..2 * n)
            .filter(|&i| i / 2 != mode)
            .collect();
        let mu = DVector::from_fn(keep.len(), |i, _| self.mu[keep[i]]);
        let sigma = DMatrix::from_fn(keep.len(), keep.len(), |i, j| self.sigma[(keep[i], keep[j])]);
        Ok(Self { mu, sigma })
    }

    /// Largest-to-smallest eigenvalue ratio of `Σ`.
    pub fn condition_number(&self) -> f64 {
        let eig = self.sigma.clone().symmetric_eigenvalues();
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for ev in eig.iter() {
            let v = ev.as_f64().abs();
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if lo == 0.0 {
            f64::INFINITY
        } else {
            hi / lo
        }
    }

    /// Check `Σ + iΩ/4 ⪰ -tol` via the equivalent real symmetric form
    /// `[[Σ, -Ω/4], [Ω/4, Σ]]`.
    pub fn is_physical(&self, tol: f64) -> bool {
        let dim = self.dim();
        let omega = symplectic_form::<T>(self.n_modes());
        let quarter = T::lit(0.25);
        let mut big = DMatrix::zeros(2 * dim, 2 * dim);
        for i in 0..dim {
            for j in 0..dim {
                big[(i, j)] = self.sigma[(i, j)];
                big[(dim + i, dim + j)] = self.sigma[(i, j)];
                big[(i, dim + j)] = -omega[(i, j)] * quarter;
                big[(dim + i, j)] = omega[(i, j)] * quarter;
            }
        }
        big.symmetric_eigenvalues()
            .iter()
            .all(|ev| ev.as_f64() >= -tol)
    }
}

/// The symplectic form `Ω = ⊕ₙ [[0, 1], [-1, 0]]` in `(x₁,p₁,…)` ordering.
pub fn symplectic_form<T: Real>(n_modes: usize) -> DMatrix<T> {
    let dim = 2 * n_modes;
    let mut omega = DMatrix::zeros(dim, dim);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = T::one();
        omega[(2 * k + 1, 2 * k)] = -T::one();
    }
    omega
}
