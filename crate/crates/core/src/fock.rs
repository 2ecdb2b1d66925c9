//! Truncated number-state simulator used as an independent cross-check of the
//! Gaussian path. It is deliberately brute force: full state vectors, gate
//! generators exponentiated by sub-stepped Taylor series, and detector
//! statistics summed basis state by basis state.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::gaussian::{DetectorModel, GateKind};
use crate::scalar::Real;

/// Extra levels kept while a gate acts; amplitude that leaves the working box
/// through the pad is counted as truncation loss when projecting back.
const PAD_LEVELS: usize = 8;
/// Relative norm loss that fails a gate application.
pub const NORM_LOSS_LIMIT: f64 = 1e-8;

/// A pure state of `n` modes in a number basis truncated at `cutoff` photons
/// per mode. Index layout is little-endian: mode 0 varies fastest.
#[derive(Debug, Clone)]
pub struct FockState<T: Real> {
    n_modes: usize,
    cutoff: usize,
    amp: Vec<Complex<T>>,
}

impl<T: Real> FockState<T> {
    pub fn vacuum(n_modes: usize, cutoff: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidArgument(
                "a state needs at least one mode".into(),
            ));
        }
        if cutoff == 0 {
            return Err(Error::InvalidArgument("cutoff must be at least 1".into()));
        }
        let mut amp = vec![Complex::new(T::zero(), T::zero()); (cutoff + 1).pow(n_modes as u32)];
        amp[0] = Complex::new(T::one(), T::zero());
        Ok(Self {
            n_modes,
            cutoff,
            amp,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn norm_sq(&self) -> T {
        self.amp
            .iter()
            .fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    /// Apply a Gaussian unitary by exponentiating its generator in a padded
    /// basis, then projecting back to the working cutoff. Fails with a
    /// truncation error if the projection loses a relative norm of
    /// [`NORM_LOSS_LIMIT`] or more.
    pub fn apply_gate(&self, kind: GateKind, params: &[T], modes: &[usize]) -> Result<Self> {
        if modes.len() != kind.arity() {
            return Err(Error::InvalidArgument(format!(
                "{kind:?} acts on {} mode(s), got {:?}",
                kind.arity(),
                modes
            )));
        }
        for (i, &m) in modes.iter().enumerate() {
            if m >= self.n_modes {
                return Err(Error::InvalidArgument(format!(
                    "mode {m} out of range for {} modes",
                    self.n_modes
                )));
            }
            if modes[..i].contains(&m) {
                return Err(Error::InvalidArgument(format!("duplicate target mode {m}")));
            }
        }
        if params.len() != kind.param_count() {
            return Err(Error::InvalidArgument(format!(
                "{kind:?} takes {} parameter(s), got {}",
                kind.param_count(),
                params.len()
            )));
        }

        let levels = self.cutoff + 1;
        let padded = self.cutoff + PAD_LEVELS + 1;
        let generator = build_generator(kind, params, padded);

        // Gather the fibers over the target modes into a padded working array.
        let strides: Vec<usize> = (0..self.n_modes).map(|i| levels.pow(i as u32)).collect();
        let other_modes: Vec<usize> = (0..self.n_modes).filter(|m| !modes.contains(m)).collect();
        let n_other: usize = other_modes.iter().map(|_| levels).product::<usize>().max(1);
        let sub_dim = padded.pow(modes.len() as u32);

        let mut work = vec![Complex::new(T::zero(), T::zero()); sub_dim * n_other];
        for fiber in 0..n_other {
            let mut base = 0usize;
            let mut rem = fiber;
            for &om in &other_modes {
                base += (rem % levels) * strides[om];
                rem /= levels;
            }
            for sub in 0..levels.pow(modes.len() as u32) {
                let mut src = base;
                let mut pad_idx = 0usize;
                let mut rem = sub;
                let mut pstride = 1usize;
                for &tm in modes {
                    let level = rem % levels;
                    rem /= levels;
                    src += level * strides[tm];
                    pad_idx += level * pstride;
                    pstride *= padded;
                }
                work[pad_idx * n_other + fiber] = self.amp[src];
            }
        }

        exp_action(&generator, sub_dim, &mut work, n_other);

        // Project back and account the amplitude left in the pad band.
        let norm_before = self.norm_sq().as_f64();
        let mut out = self.clone();
        for fiber in 0..n_other {
            let mut base = 0usize;
            let mut rem = fiber;
            for &om in &other_modes {
                base += (rem % levels) * strides[om];
                rem /= levels;
            }
            for sub in 0..levels.pow(modes.len() as u32) {
                let mut dst = base;
                let mut pad_idx = 0usize;
                let mut rem = sub;
                let mut pstride = 1usize;
                for &tm in modes {
                    let level = rem % levels;
                    rem /= levels;
                    dst += level * strides[tm];
                    pad_idx += level * pstride;
                    pstride *= padded;
                }
                out.amp[dst] = work[pad_idx * n_other + fiber];
            }
        }
        let norm_after = out.norm_sq().as_f64();
        let norm_loss = (norm_before - norm_after) / norm_before.max(f64::MIN_POSITIVE);
        if norm_loss >= NORM_LOSS_LIMIT {
            return Err(Error::Truncation { norm_loss });
        }
        Ok(out)
    }

    /// Photon-number distribution of one mode (marginal over the others),
    /// normalized by the state norm.
    pub fn photon_distribution(&self, mode: usize) -> Vec<T> {
        let levels = self.cutoff + 1;
        let mut dist = vec![T::zero(); levels];
        for (idx, a) in self.amp.iter().enumerate() {
            dist[level_of(idx, mode, levels)] += a.norm_sqr();
        }
        let norm = self.norm_sq();
        dist.iter().map(|&d| d / norm).collect()
    }

    /// Click-pattern distribution over a subset of modes, each read out by an
    /// identical detector; unmeasured modes are traced out. Pattern bit `i`
    /// (LSB) refers to `modes[i]`. Normalized by the state norm so the
    /// distribution sums to one.
    pub fn pattern_probabilities(&self, det: &DetectorModel<T>, modes: &[usize]) -> Vec<T> {
        let m = modes.len();
        let levels = self.cutoff + 1;
        // Per-mode per-level no-click weight (1-p_dc)·(1-η)^n.
        let survive = T::one() - det.efficiency();
        let no_dark = T::one() - det.dark_count_prob();
        let mut weights = vec![T::one(); levels];
        for n in 1..levels {
            weights[n] = weights[n - 1] * survive;
        }
        // Joint no-click expectations for every forced set ℓ.
        let n_patterns = 1usize << m;
        let mut expect = vec![T::zero(); n_patterns];
        for (idx, a) in self.amp.iter().enumerate() {
            let p = a.norm_sqr();
            if p == T::zero() {
                continue;
            }
            let mode_w: Vec<T> = modes
                .iter()
                .map(|&mm| no_dark * weights[level_of(idx, mm, levels)])
                .collect();
            for (ell, slot) in expect.iter_mut().enumerate() {
                let mut w = p;
                for (i, &mw) in mode_w.iter().enumerate() {
                    if ell >> i & 1 == 1 {
                        w *= mw;
                    }
                }
                *slot += w;
            }
        }
        let norm = self.norm_sq();
        // Inclusion–exclusion over the clicked positions.
        let mut probs = Vec::with_capacity(n_patterns);
        for k in 0..n_patterns {
            let forced = !k & (n_patterns - 1);
            let mut p = T::zero();
            let mut sub = k;
            loop {
                let term = expect[forced | sub];
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
            probs.push(p / norm);
        }
        probs
    }

    /// Probability that a detector on `mode` reports no click.
    pub fn no_click_probability(&self, det: &DetectorModel<T>, mode: usize) -> T {
        self.pattern_probabilities(det, &[mode])[0]
    }
}

fn level_of(idx: usize, mode: usize, levels: usize) -> usize {
    (idx / levels.pow(mode as u32)) % levels
}

fn polar<T: Real>(r: T, theta: T) -> Complex<T> {
    Complex::new(r * theta.cos(), r * theta.sin())
}

/// Sparse generator (row, col, value) of a gate on its 1- or 2-mode subspace
/// with `padded` levels per mode. Index layout matches the fiber gather:
/// first listed mode varies fastest.
fn build_generator<T: Real>(
    kind: GateKind,
    params: &[T],
    padded: usize,
) -> Vec<(usize, usize, Complex<T>)> {
    let mut g = Vec::new();
    let sq = |n: usize| T::from_usize(n).unwrap().sqrt();
    match kind {
        GateKind::Displacement => {
            // α a† - α* a
            let alpha = Complex::new(params[0], params[1]);
            for n in 0..padded - 1 {
                g.push((n + 1, n, alpha * sq(n + 1)));
                g.push((n, n + 1, -alpha.conj() * sq(n + 1)));
            }
        }
        GateKind::PhaseShifter => {
            // -iθ a†a
            let theta = params[0];
            for n in 1..padded {
                g.push((n, n, Complex::new(T::zero(), -theta * T::from_usize(n).unwrap())));
            }
        }
        GateKind::SingleModeSqueezer => {
            // (z* a² - z a†²)/2
            let z = polar(params[0], params[1]);
            let half = T::lit(0.5);
            for n in 0..padded - 2 {
                let c = sq(n + 1) * sq(n + 2) * half;
                g.push((n, n + 2, z.conj() * c));
                g.push((n + 2, n, -z * c));
            }
        }
        GateKind::Beamsplitter => {
            // θ(a†b - a b†), sub-index n_a + padded·n_b
            let theta = params[0];
            for na in 0..padded {
                for nb in 0..padded {
                    let from = na + padded * nb;
                    if na + 1 < padded && nb > 0 {
                        let c = theta * sq(na + 1) * sq(nb);
                        g.push((na + 1 + padded * (nb - 1), from, Complex::new(c, T::zero())));
                    }
                    if na > 0 && nb + 1 < padded {
                        let c = theta * sq(na) * sq(nb + 1);
                        g.push((na - 1 + padded * (nb + 1), from, Complex::new(-c, T::zero())));
                    }
                }
            }
        }
        GateKind::TwoModeSqueezer => {
            // z* ab - z a†b†
            let z = polar(params[0], params[1]);
            for na in 0..padded {
                for nb in 0..padded {
                    let from = na + padded * nb;
                    if na > 0 && nb > 0 {
                        let c = sq(na) * sq(nb);
                        g.push((na - 1 + padded * (nb - 1), from, z.conj() * c));
                    }
                    if na + 1 < padded && nb + 1 < padded {
                        let c = sq(na + 1) * sq(nb + 1);
                        g.push((na + 1 + padded * (nb + 1), from, -z * c));
                    }
                }
            }
        }
    }
    g
}

/// Apply `exp(G)` to `n_cols` column vectors stored row-major in `work`
/// (`work[row * n_cols + col]`), by scaling into substeps and summing the
/// Taylor series of each substep to machine precision.
fn exp_action<T: Real>(
    generator: &[(usize, usize, Complex<T>)],
    dim: usize,
    work: &mut [Complex<T>],
    n_cols: usize,
) {
    // Column-sum norm bounds the spectral radius.
    let mut col_sums = vec![0.0f64; dim];
    for &(_, c, v) in generator {
        col_sums[c] += v.norm_sqr().sqrt().as_f64();
    }
    let norm1 = col_sums.iter().cloned().fold(0.0, f64::max);
    let substeps = (norm1 / 2.0).ceil().max(1.0) as usize;
    let scale = T::one() / T::from_usize(substeps).unwrap();

    let zero = Complex::new(T::zero(), T::zero());
    let mut term = vec![zero; work.len()];
    let mut next = vec![zero; work.len()];
    for _ in 0..substeps {
        term.copy_from_slice(work);
        let mut factorial_scale;
        for k in 1..=64usize {
            next.iter_mut().for_each(|v| *v = zero);
            for &(r, c, v) in generator {
                let vv = v * scale;
                for col in 0..n_cols {
                    next[r * n_cols + col] += vv * term[c * n_cols + col];
                }
            }
            factorial_scale = T::one() / T::from_usize(k).unwrap();
            let mut term_norm = T::zero();
            for i in 0..work.len() {
                let t = next[i] * factorial_scale;
                term[i] = t;
                work[i] += t;
                term_norm += t.norm_sqr();
            }
            if term_norm.as_f64() < 1e-34 {
                break;
            }
        }
    }
}
