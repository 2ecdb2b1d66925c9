use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gaussian::state::{symplectic_form, GaussianState};
use crate::scalar::Real;

/// Elementwise tolerance for the symplectic identity `MᵀΩM = Ω`.
pub const SYMPLECTIC_TOL: f64 = 1e-12;

/// The five Gaussian unitaries supported by the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Displacement,
    PhaseShifter,
    SingleModeSqueezer,
    TwoModeSqueezer,
    Beamsplitter,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Displacement | GateKind::PhaseShifter | GateKind::SingleModeSqueezer => 1,
            GateKind::TwoModeSqueezer | GateKind::Beamsplitter => 2,
        }
    }

    /// Number of real parameters: `α` counts as two, `z = r·e^{iθ}` as two,
    /// a plain angle as one.
    pub fn param_count(self) -> usize {
        match self {
            GateKind::PhaseShifter | GateKind::Beamsplitter => 1,
            _ => 2,
        }
    }
}

/// A Gaussian operation in its affine form: `(μ, Σ) ↦ (Mμ + d, MΣMᵀ)` with
/// `M` symplectic. `d` vanishes outside the target-mode entries and `M` is
/// the identity outside the target-mode block.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticOp<T: Real> {
    kind: GateKind,
    targets: Vec<usize>,
    params: Vec<T>,
    d: DVector<T>,
    m: DMatrix<T>,
}

impl<T: Real> SymplecticOp<T> {
    /// Build a gate from its kind, parameters and target modes, embedded in an
    /// `n_total`-mode system. Parameter layout: displacement `[Re α, Im α]`,
    /// phase shifter `[θ]`, squeezers `[r, θ]`, beamsplitter `[θ]`.
    pub fn new(kind: GateKind, params: &[T], targets: &[usize], n_total: usize) -> Result<Self> {
        match kind {
            GateKind::Displacement => {
                expect_params(kind, params, 2)?;
                Self::displacement(one_mode(targets)?, params[0], params[1], n_total)
            }
            GateKind::PhaseShifter => {
                expect_params(kind, params, 1)?;
                Self::phase_shifter(one_mode(targets)?, params[0], n_total)
            }
            GateKind::SingleModeSqueezer => {
                expect_params(kind, params, 2)?;
                Self::squeezer(one_mode(targets)?, params[0], params[1], n_total)
            }
            GateKind::TwoModeSqueezer => {
                expect_params(kind, params, 2)?;
                let (i, j) = two_modes(targets)?;
                Self::two_mode_squeezer(i, j, params[0], params[1], n_total)
            }
            GateKind::Beamsplitter => {
                expect_params(kind, params, 1)?;
                let (i, j) = two_modes(targets)?;
                Self::beamsplitter(i, j, params[0], n_total)
            }
        }
    }

    /// `D(α)`: shifts `(x, p)` by `(Re α, Im α)`.
    pub fn displacement(mode: usize, re: T, im: T, n_total: usize) -> Result<Self> {
        check_modes(&[mode], n_total)?;
        check_finite(&[re, im])?;
        let mut d = DVector::zeros(2 * n_total);
        d[2 * mode] = re;
        d[2 * mode + 1] = im;
        Ok(Self {
            kind: GateKind::Displacement,
            targets: vec![mode],
            params: vec![re, im],
            d,
            m: DMatrix::identity(2 * n_total, 2 * n_total),
        })
    }

    /// `Φ(θ) = exp(-iθ a†a)`: rotates the quadratures of one mode.
    pub fn phase_shifter(mode: usize, theta: T, n_total: usize) -> Result<Self> {
        check_modes(&[mode], n_total)?;
        check_finite(&[theta])?;
        let (s, c) = theta.sin_cos();
        let mut m = DMatrix::identity(2 * n_total, 2 * n_total);
        let b = 2 * mode;
        m[(b, b)] = c;
        m[(b, b + 1)] = s;
        m[(b + 1, b)] = -s;
        m[(b + 1, b + 1)] = c;
        Ok(Self {
            kind: GateKind::PhaseShifter,
            targets: vec![mode],
            params: vec![theta],
            d: DVector::zeros(2 * n_total),
            m,
        })
    }

    /// `S(z) = exp((z* a² - z a†²)/2)` with `z = r·e^{iθ}`.
    pub fn squeezer(mode: usize, r: T, theta: T, n_total: usize) -> Result<Self> {
        check_modes(&[mode], n_total)?;
        check_finite(&[r, theta])?;
        let (ch, sh) = (r.cosh(), r.sinh());
        let (s, c) = theta.sin_cos();
        let mut m = DMatrix::identity(2 * n_total, 2 * n_total);
        let b = 2 * mode;
        m[(b, b)] = ch - sh * c;
        m[(b, b + 1)] = -sh * s;
        m[(b + 1, b)] = -sh * s;
        m[(b + 1, b + 1)] = ch + sh * c;
        Ok(Self {
            kind: GateKind::SingleModeSqueezer,
            targets: vec![mode],
            params: vec![r, theta],
            d: DVector::zeros(2 * n_total),
            m,
        })
    }

    /// `TMS(z) = exp(z* aᵢaⱼ - z aᵢ†aⱼ†)` with `z = r·e^{iθ}`.
    pub fn two_mode_squeezer(i: usize, j: usize, r: T, theta: T, n_total: usize) -> Result<Self> {
        check_modes(&[i, j], n_total)?;
        check_finite(&[r, theta])?;
        let (ch, sh) = (r.cosh(), r.sinh());
        let (s, c) = theta.sin_cos();
        let mut m = DMatrix::identity(2 * n_total, 2 * n_total);
        let (bi, bj) = (2 * i, 2 * j);
        m[(bi, bi)] = ch;
        m[(bi + 1, bi + 1)] = ch;
        m[(bj, bj)] = ch;
        m[(bj + 1, bj + 1)] = ch;
        m[(bi, bj)] = -sh * c;
        m[(bi, bj + 1)] = -sh * s;
        m[(bi + 1, bj)] = -sh * s;
        m[(bi + 1, bj + 1)] = sh * c;
        m[(bj, bi)] = -sh * c;
        m[(bj, bi + 1)] = -sh * s;
        m[(bj + 1, bi)] = -sh * s;
        m[(bj + 1, bi + 1)] = sh * c;
        Ok(Self {
            kind: GateKind::TwoModeSqueezer,
            targets: vec![i, j],
            params: vec![r, theta],
            d: DVector::zeros(2 * n_total),
            m,
        })
    }

    /// `BS(θ) = exp(θ(aᵢ†aⱼ - aᵢaⱼ†))`; transmittivity `cos²θ`.
    pub fn beamsplitter(i: usize, j: usize, theta: T, n_total: usize) -> Result<Self> {
        check_modes(&[i, j], n_total)?;
        check_finite(&[theta])?;
        let (s, c) = theta.sin_cos();
        let mut m = DMatrix::identity(2 * n_total, 2 * n_total);
        let (bi, bj) = (2 * i, 2 * j);
        for q in 0..2 {
            m[(bi + q, bi + q)] = c;
            m[(bi + q, bj + q)] = s;
            m[(bj + q, bi + q)] = -s;
            m[(bj + q, bj + q)] = c;
        }
        Ok(Self {
            kind: GateKind::Beamsplitter,
            targets: vec![i, j],
            params: vec![theta],
            d: DVector::zeros(2 * n_total),
            m,
        })
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn params(&self) -> &[T] {
        &self.params
    }

    pub fn n_modes(&self) -> usize {
        self.d.len() / 2
    }

    pub fn displacement_part(&self) -> &DVector<T> {
        &self.d
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.m
    }

    /// Apply to a single Gaussian state: `(μ, Σ) ↦ (Mμ + d, MΣMᵀ)`.
    pub fn apply(&self, state: &GaussianState<T>) -> Result<GaussianState<T>> {
        if state.n_modes() != self.n_modes() {
            return Err(Error::InvalidArgument(format!(
                "operation on {} modes applied to a {}-mode state",
                self.n_modes(),
                state.n_modes()
            )));
        }
        let mu = &self.m * state.mu() + &self.d;
        let sigma = &self.m * state.sigma() * self.m.transpose();
        Ok(GaussianState::from_parts_symmetrized(mu, sigma))
    }

    /// Elementwise check of `MᵀΩM = Ω`.
    pub fn symplectic_defect(&self) -> f64 {
        let omega = symplectic_form::<T>(self.n_modes());
        let lhs = self.m.transpose() * &omega * &self.m;
        let mut worst = 0.0f64;
        for i in 0..lhs.nrows() {
            for j in 0..lhs.ncols() {
                worst = worst.max((lhs[(i, j)] - omega[(i, j)]).abs().as_f64());
            }
        }
        worst
    }
}

fn expect_params<T: Real>(kind: GateKind, params: &[T], n: usize) -> Result<()> {
    if params.len() != n {
        return Err(Error::InvalidArgument(format!(
            "{kind:?} takes {n} parameter(s), got {}",
            params.len()
        )));
    }
    Ok(())
}

fn one_mode(targets: &[usize]) -> Result<usize> {
    match targets {
        [m] => Ok(*m),
        _ => Err(Error::InvalidArgument(format!(
            "single-mode gate takes one target, got {targets:?}"
        ))),
    }
}

fn two_modes(targets: &[usize]) -> Result<(usize, usize)> {
    match targets {
        [i, j] => Ok((*i, *j)),
        _ => Err(Error::InvalidArgument(format!(
            "two-mode gate takes two targets, got {targets:?}"
        ))),
    }
}

fn check_modes(modes: &[usize], n_total: usize) -> Result<()> {
    if n_total == 0 {
        return Err(Error::InvalidArgument("zero-mode system".into()));
    }
    for (idx, &m) in modes.iter().enumerate() {
        if m >= n_total {
            return Err(Error::InvalidArgument(format!(
                "mode {m} out of range for {n_total} modes"
            )));
        }
        if modes[..idx].contains(&m) {
            return Err(Error::InvalidArgument(format!(
                "duplicate target mode {m}"
            )));
        }
    }
    Ok(())
}

fn check_finite<T: Real>(params: &[T]) -> Result<()> {
    for p in params {
        if !p.is_finite() {
            return Err(Error::InvalidArgument("non-finite gate parameter".into()));
        }
    }
    Ok(())
}
