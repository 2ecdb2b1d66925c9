//! Unit and property tests of the Gaussian-formalism simulator.
//!
//! Reference values come from closed forms that are easy to re-derive:
//! a coherent state's click statistics are Poissonian, a two-mode squeezed
//! vacuum has `p(n,n) = tanh²ⁿ(r)/cosh²(r)`, and the states produced by pure
//! squeezing have covariances that follow directly from the symplectic
//! matrices. The Poisson sums are re-computed here rather than pasted.

use diqkd_core::gaussian::{
    symplectic_form, DetectorModel, GateKind, GaussianState, QuasiMixture, SymplecticOp,
};
use diqkd_core::Error;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;

fn coherent(alpha_re: f64, alpha_im: f64, n: usize, mode: usize) -> QuasiMixture<f64> {
    let vac = QuasiMixture::vacuum(n).unwrap();
    let d = SymplecticOp::displacement(mode, alpha_re, alpha_im, n).unwrap();
    vac.apply(&d).unwrap()
}

/// `Σₙ e^{-|α|²}|α|^{2n}/n! · (1-η)ⁿ = e^{-η|α|²}`, summed explicitly.
fn poisson_no_click(alpha_sq: f64, eta: f64) -> f64 {
    let mut term = (-alpha_sq).exp();
    let mut sum = 0.0;
    for n in 0..200 {
        sum += term * (1.0 - eta).powi(n);
        term *= alpha_sq / (n as f64 + 1.0);
    }
    sum
}

#[test]
fn vacuum_moments() {
    let v: GaussianState<f64> = GaussianState::vacuum(1).unwrap();
    assert_eq!(v.mu().as_slice(), &[0.0, 0.0]);
    assert_eq!(v.sigma()[(0, 0)], 0.25);
    assert_eq!(v.sigma()[(1, 1)], 0.25);
    assert_eq!(v.sigma()[(0, 1)], 0.0);

    let v3: GaussianState<f64> = GaussianState::vacuum(3).unwrap();
    assert!((v3.sigma().trace() - 1.5).abs() < TOL);

    assert!(matches!(
        GaussianState::<f64>::vacuum(0),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn vacuum_saturates_uncertainty() {
    let v: GaussianState<f64> = GaussianState::vacuum(2).unwrap();
    assert!(v.is_physical(1e-12));
}

#[test]
fn trivial_gates_are_identity() {
    let ps = SymplecticOp::<f64>::phase_shifter(0, 0.0, 2).unwrap();
    assert_eq!(ps.matrix(), &nalgebra::DMatrix::identity(4, 4));
    let s = SymplecticOp::<f64>::squeezer(1, 0.0, 0.7, 2).unwrap();
    assert_eq!(s.matrix(), &nalgebra::DMatrix::identity(4, 4));
}

#[test]
fn two_mode_squeezer_entries() {
    let op = SymplecticOp::<f64>::two_mode_squeezer(0, 1, 0.5, 0.0, 2).unwrap();
    let (ch, sh) = (0.5f64.cosh(), 0.5f64.sinh());
    let m = op.matrix();
    for q in 0..4 {
        assert!((m[(q, q)] - ch).abs() < TOL);
    }
    assert!((m[(0, 2)] + sh).abs() < TOL);
    assert!((m[(1, 3)] - sh).abs() < TOL);
    assert!((m[(2, 0)] + sh).abs() < TOL);
    assert!((m[(3, 1)] - sh).abs() < TOL);
}

#[test]
fn duplicate_modes_rejected() {
    assert!(matches!(
        SymplecticOp::<f64>::two_mode_squeezer(1, 1, 0.3, 0.0, 3),
        Err(Error::InvalidArgument(_))
    ));
    assert!(matches!(
        SymplecticOp::<f64>::new(GateKind::Beamsplitter, &[0.3], &[2, 2], 3),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn symplectic_identity_random_gates() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let p1: f64 = rng.gen_range(-2.0..2.0);
        let p2: f64 = rng.gen_range(-2.0..2.0);
        let op = match rng.gen_range(0..5) {
            0 => SymplecticOp::displacement(0, p1, p2, 3),
            1 => SymplecticOp::phase_shifter(1, p1, 3),
            2 => SymplecticOp::squeezer(2, p1, p2, 3),
            3 => SymplecticOp::two_mode_squeezer(0, 2, p1, p2, 3),
            _ => SymplecticOp::beamsplitter(1, 2, p1, 3),
        }
        .unwrap();
        assert!(
            op.symplectic_defect() < 1e-12,
            "defect {} for {:?}",
            op.symplectic_defect(),
            op.kind()
        );
    }
}

#[test]
fn gates_invert_and_preserve_physicality() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let r: f64 = rng.gen_range(-1.5..1.5);
        let th: f64 = rng.gen_range(-3.0..3.0);
        let state = QuasiMixture::vacuum(2)
            .unwrap()
            .apply(&SymplecticOp::two_mode_squeezer(0, 1, 0.4, 0.2, 2).unwrap())
            .unwrap();
        let pairs = [
            (
                SymplecticOp::squeezer(0, r, th, 2).unwrap(),
                SymplecticOp::squeezer(0, -r, th, 2).unwrap(),
            ),
            (
                SymplecticOp::two_mode_squeezer(0, 1, r, th, 2).unwrap(),
                SymplecticOp::two_mode_squeezer(0, 1, -r, th, 2).unwrap(),
            ),
            (
                SymplecticOp::beamsplitter(0, 1, th, 2).unwrap(),
                SymplecticOp::beamsplitter(0, 1, -th, 2).unwrap(),
            ),
            (
                SymplecticOp::phase_shifter(1, th, 2).unwrap(),
                SymplecticOp::phase_shifter(1, -th, 2).unwrap(),
            ),
            (
                SymplecticOp::displacement(0, r, th, 2).unwrap(),
                SymplecticOp::displacement(0, -r, -th, 2).unwrap(),
            ),
        ];
        for (fwd, back) in pairs {
            let roundtrip = state.apply(&fwd).unwrap().apply(&back).unwrap();
            let b0 = &state.branches()[0];
            let b1 = &roundtrip.branches()[0];
            assert!((b0.state.mu() - b1.state.mu()).amax() < 1e-10);
            assert!((b0.state.sigma() - b1.state.sigma()).amax() < 1e-10);
            assert!(b1.state.is_physical(1e-9));
        }
    }
}

#[test]
fn displacement_on_vacuum() {
    let state = coherent(1.0, 0.0, 1, 0);
    let b = &state.branches()[0];
    assert!((b.state.mu()[0] - 1.0).abs() < TOL);
    assert!(b.state.mu()[1].abs() < TOL);
    assert!((b.state.sigma()[(0, 0)] - 0.25).abs() < TOL);
}

#[test]
fn swap_beamsplitter_moves_mode() {
    // At θ = π/2 the beamsplitter exchanges the modes (up to sign).
    let state = coherent(0.8, -0.3, 2, 0);
    let bs = SymplecticOp::beamsplitter(0, 1, std::f64::consts::FRAC_PI_2, 2).unwrap();
    let out = state.apply(&bs).unwrap();
    let mu = out.branches()[0].state.mu();
    assert!(mu[0].abs() < TOL && mu[1].abs() < TOL);
    assert!((mu[2] + 0.8).abs() < TOL);
    assert!((mu[3] + -0.3).abs() < TOL);
}

#[test]
fn tms_marginal_is_thermal() {
    // TMS(r) on two-mode vacuum, tracing either mode: Σ = cosh(2r)/4 · I.
    let tms = SymplecticOp::two_mode_squeezer(0, 1, 0.5, 0.0, 2).unwrap();
    let state = QuasiMixture::vacuum(2).unwrap().apply(&tms).unwrap();
    let reduced = state.trace_out(1).unwrap();
    let sigma = reduced.branches()[0].state.sigma();
    let expected = 1.0f64.cosh() / 4.0;
    assert!((sigma[(0, 0)] - expected).abs() < 1e-12);
    assert!((sigma[(1, 1)] - expected).abs() < 1e-12);
    assert!(sigma[(0, 1)].abs() < 1e-12);
    assert!((reduced.weight_sum() - 1.0).abs() < 1e-12);
}

#[test]
fn trace_out_product_state() {
    let state = coherent(0.7, 0.2, 2, 0);
    let reduced = state.trace_out(1).unwrap();
    let b = &reduced.branches()[0];
    assert!((b.state.mu()[0] - 0.7).abs() < TOL);
    assert!((b.state.mu()[1] - 0.2).abs() < TOL);

    let single = QuasiMixture::<f64>::vacuum(1).unwrap();
    assert!(matches!(
        single.trace_out(0),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn no_click_probability_vacuum_and_coherent() {
    let det: DetectorModel<f64> = DetectorModel::ideal();
    let vac = QuasiMixture::<f64>::vacuum(1).unwrap();
    assert!((vac.no_click_probability(0, &det).unwrap() - 1.0).abs() < 1e-14);

    let state = coherent(1.0, 0.0, 1, 0);
    let expected = poisson_no_click(1.0, 1.0);
    assert!((expected - (-1.0f64).exp()).abs() < 1e-13);
    assert!((state.no_click_probability(0, &det).unwrap() - expected).abs() < 1e-10);

    // Partial efficiency, Poisson oracle with survival factor (1-η)ⁿ.
    let det_half = DetectorModel::new(0.5, 0.0).unwrap();
    let expected_half = poisson_no_click(1.0, 0.5);
    assert!(
        (state.no_click_probability(0, &det_half).unwrap() - expected_half).abs() < 1e-10
    );
}

#[test]
fn no_click_probability_tmsv() {
    // Detector on mode 1 of TMS(0.5)|00⟩: 1/cosh²(0.5).
    let tms = SymplecticOp::two_mode_squeezer(0, 1, 0.5, 0.0, 2).unwrap();
    let state = QuasiMixture::vacuum(2).unwrap().apply(&tms).unwrap();
    let det: DetectorModel<f64> = DetectorModel::ideal();
    let expected = 1.0 / 0.5f64.cosh().powi(2);
    assert!((state.no_click_probability(1, &det).unwrap() - expected).abs() < 1e-10);
}

#[test]
fn singular_covariance_rejected() {
    // A wildly squeezed state overflows the condition guard.
    let sq = SymplecticOp::squeezer(0, 16.0, 0.0, 2).unwrap();
    let state = QuasiMixture::vacuum(2).unwrap().apply(&sq).unwrap();
    let det: DetectorModel<f64> = DetectorModel::ideal();
    assert!(matches!(
        state.no_click_probability(0, &det),
        Err(Error::NumericalInstability(_))
    ));
}

#[test]
fn condition_no_click_identities() {
    let det: DetectorModel<f64> = DetectorModel::ideal();
    // Conditioning the vacuum is a no-op with unit probability.
    let vac = QuasiMixture::<f64>::vacuum(2).unwrap();
    let (state, p) = vac.condition_no_click(1, &det).unwrap();
    assert!((p - 1.0).abs() < 1e-12);
    assert_eq!(state.n_modes(), 1);
    assert!((state.branches()[0].state.sigma()[(0, 0)] - 0.25).abs() < 1e-12);

    // Coherent ⊗ vacuum, conditioning the vacuum mode: coherent untouched.
    let state = coherent(1.0, 0.0, 2, 0);
    let (cond, p) = state.condition_no_click(1, &det).unwrap();
    assert!((p - 1.0).abs() < 1e-12);
    assert!((cond.branches()[0].state.mu()[0] - 1.0).abs() < 1e-12);

    // Output weights renormalize to one for any input.
    let tms = SymplecticOp::two_mode_squeezer(0, 1, 0.7, 0.3, 2).unwrap();
    let squeezed = QuasiMixture::vacuum(2).unwrap().apply(&tms).unwrap();
    let (cond, _) = squeezed.condition_no_click(0, &det).unwrap();
    assert!((cond.weight_sum() - 1.0).abs() < 1e-10);
}

#[test]
fn condition_click_probability_and_branches() {
    let det: DetectorModel<f64> = DetectorModel::ideal();
    let state = coherent(1.0, 0.0, 2, 1);
    let p_click_expected = 1.0 - poisson_no_click(1.0, 1.0);
    let (cond, p) = state.condition_click(1, &det).unwrap();
    assert!((p - p_click_expected).abs() < 1e-10);
    assert_eq!(cond.branches().len(), 2 * state.branches().len());
    assert!((cond.weight_sum() - 1.0).abs() < 1e-10);

    // Vacuum can never click.
    let vac = QuasiMixture::<f64>::vacuum(2).unwrap();
    assert!(matches!(
        vac.condition_click(0, &det),
        Err(Error::HeraldImpossible { .. })
    ));
}

#[test]
fn click_and_no_click_probabilities_are_complementary() {
    let det: DetectorModel<f64> = DetectorModel::new(0.8, 0.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..40 {
        let r = rng.gen_range(-1.0..1.0);
        let th = rng.gen_range(-3.0..3.0);
        let a = rng.gen_range(-1.0..1.0);
        let state = QuasiMixture::vacuum(2)
            .unwrap()
            .apply(&SymplecticOp::two_mode_squeezer(0, 1, r, th, 2).unwrap())
            .unwrap()
            .apply(&SymplecticOp::displacement(0, a, 0.1, 2).unwrap())
            .unwrap();
        let p_no = state.no_click_probability(0, &det).unwrap();
        match state.condition_click(0, &det) {
            Ok((_, p_click)) => assert!((p_no + p_click - 1.0).abs() < 1e-10),
            Err(Error::HeraldImpossible { .. }) => assert!(p_no > 1.0 - 1e-10),
            Err(e) => panic!("unexpected error {e}"),
        }
    }
}

#[test]
fn outcome_probabilities_basics() {
    let det: DetectorModel<f64> = DetectorModel::ideal();
    // Two-mode vacuum: the all-no-click pattern has probability one.
    let vac = QuasiMixture::<f64>::vacuum(2).unwrap();
    let probs = vac.outcome_probabilities(&det).unwrap();
    assert!((probs[0] - 1.0).abs() < 1e-12);
    assert!(probs[1..].iter().all(|p| p.abs() < 1e-12));

    // Single coherent mode: click probability 1 - e^{-1}.
    let state = coherent(1.0, 0.0, 1, 0);
    let probs = state.outcome_probabilities(&det).unwrap();
    assert!((probs[1] - (1.0 - (-1.0f64).exp())).abs() < 1e-10);

    // Dark counts fire independently on silent detectors.
    let det_dark = DetectorModel::new(1.0, 1e-3).unwrap();
    let probs = vac.outcome_probabilities(&det_dark).unwrap();
    assert!((probs[0] - (1.0 - 1e-3f64).powi(2)).abs() < 1e-12);
}

#[test]
fn outcome_probabilities_normalize_on_random_mixtures() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let eta = rng.gen_range(0.3..1.0);
        let pdc = if rng.gen_bool(0.5) { 0.0 } else { 1e-3 };
        let det = DetectorModel::new(eta, pdc).unwrap();
        let mut state = QuasiMixture::vacuum(3).unwrap();
        for _ in 0..4 {
            let r = rng.gen_range(-0.9..0.9);
            let th = rng.gen_range(-3.0..3.0);
            let modes: Vec<usize> = {
                let mut m: Vec<usize> = (0..3).collect();
                m.shuffle(&mut rng);
                m.truncate(2);
                m
            };
            state = state
                .apply(&SymplecticOp::two_mode_squeezer(modes[0], modes[1], r, th, 3).unwrap())
                .unwrap();
        }
        // Click-herald the last mode to exercise signed weights.
        let state = match state.condition_click(2, &det) {
            Ok((s, _)) => s,
            Err(_) => continue,
        };
        let probs = state.outcome_probabilities(&det).unwrap();
        let total: f64 = probs.iter().sum();
        assert!((total - 1.0).abs() < 1e-10, "patterns sum to {total}");
        assert_eq!(state.n_modes(), 2);
    }
}

#[test]
fn empty_no_click_set_is_exactly_one() {
    // ⟨ô_ℓ⟩ with ℓ = all-zeros is the trace, exactly 1 in floating point.
    let det = DetectorModel::new(0.37, 0.0).unwrap();
    let state = coherent(0.9, 0.4, 2, 0);
    let probs = state.outcome_probabilities(&det).unwrap();
    let total: f64 = probs.iter().sum();
    assert_eq!(total, 1.0);
}

#[test]
fn symplectic_form_shape() {
    let omega = symplectic_form::<f64>(2);
    assert_eq!(omega[(0, 1)], 1.0);
    assert_eq!(omega[(1, 0)], -1.0);
    assert_eq!(omega[(2, 3)], 1.0);
    assert_eq!(omega.row_iter().count(), 4);
}
