//! Tests of the truncated number-basis oracle against closed forms, and the
//! randomized agreement check between the two simulation paths.

use diqkd_core::fock::FockState;
use diqkd_core::gaussian::{DetectorModel, GateKind};
use diqkd_core::testkit;
use diqkd_core::Error;

#[test]
fn displaced_vacuum_is_poissonian() {
    let state = FockState::<f64>::vacuum(1, 40)
        .unwrap()
        .apply_gate(GateKind::Displacement, &[1.0, 0.0], &[0])
        .unwrap();
    let dist = state.photon_distribution(0);
    let mut expected = (-1.0f64).exp();
    for (n, p) in dist.iter().enumerate().take(25) {
        assert!(
            (p - expected).abs() < 1e-10,
            "p({n}) = {p}, expected {expected}"
        );
        expected /= n as f64 + 1.0;
    }
}

#[test]
fn zero_squeezing_is_identity() {
    let before = FockState::<f64>::vacuum(1, 20)
        .unwrap()
        .apply_gate(GateKind::Displacement, &[0.5, 0.2], &[0])
        .unwrap();
    let after = before
        .apply_gate(GateKind::SingleModeSqueezer, &[0.0, 1.3], &[0])
        .unwrap();
    let d0 = before.photon_distribution(0);
    let d1 = after.photon_distribution(0);
    for (a, b) in d0.iter().zip(d1.iter()) {
        assert!((a - b).abs() < 1e-14);
    }
}

#[test]
fn two_mode_squeezed_vacuum_distribution() {
    let r = 0.5f64;
    let state = FockState::<f64>::vacuum(2, 40)
        .unwrap()
        .apply_gate(GateKind::TwoModeSqueezer, &[r, 0.0], &[0, 1])
        .unwrap();
    // p(n, n) = tanh(r)^{2n} / cosh(r)^2, all off-diagonal vanish.
    let dist0 = state.photon_distribution(0);
    let dist1 = state.photon_distribution(1);
    for n in 0..10 {
        let expected = r.tanh().powi(2 * n as i32) / r.cosh().powi(2);
        assert!((dist0[n] - expected).abs() < 1e-10);
        assert!((dist1[n] - expected).abs() < 1e-10);
    }
}

#[test]
fn unitarity_when_cutoff_suffices() {
    let state = FockState::<f64>::vacuum(2, 40)
        .unwrap()
        .apply_gate(GateKind::TwoModeSqueezer, &[0.6, 0.4], &[0, 1])
        .unwrap()
        .apply_gate(GateKind::Beamsplitter, &[0.9, ], &[0, 1])
        .unwrap()
        .apply_gate(GateKind::PhaseShifter, &[1.1], &[1])
        .unwrap();
    assert!((state.norm_sq() - 1.0).abs() < 1e-10);
}

#[test]
fn truncation_error_detected() {
    // A huge displacement cannot fit in a tiny basis.
    let result = FockState::<f64>::vacuum(1, 4)
        .unwrap()
        .apply_gate(GateKind::Displacement, &[3.0, 0.0], &[0]);
    assert!(matches!(result, Err(Error::Truncation { .. })));
}

#[test]
fn detector_closed_forms() {
    let state = FockState::<f64>::vacuum(1, 40)
        .unwrap()
        .apply_gate(GateKind::Displacement, &[1.0, 0.0], &[0])
        .unwrap();
    let det = DetectorModel::new(0.5, 0.0).unwrap();
    let p = state.no_click_probability(&det, 0);
    assert!((p - (-0.5f64).exp()).abs() < 1e-10);

    let tmsv = FockState::<f64>::vacuum(2, 40)
        .unwrap()
        .apply_gate(GateKind::TwoModeSqueezer, &[0.5, 0.0], &[0, 1])
        .unwrap();
    let ideal = DetectorModel::ideal();
    let p = tmsv.no_click_probability(&ideal, 1);
    assert!((p - 1.0 / 0.5f64.cosh().powi(2)).abs() < 1e-10);

    // All-vacuum never clicks.
    let vac = FockState::<f64>::vacuum(2, 10).unwrap();
    let probs = vac.pattern_probabilities(&ideal, &[0, 1]);
    assert!((probs[0] - 1.0).abs() < 1e-12);
}

#[test]
fn pattern_distributions_normalize() {
    let det = DetectorModel::new(0.8, 1e-3).unwrap();
    let state = FockState::<f64>::vacuum(2, 40)
        .unwrap()
        .apply_gate(GateKind::TwoModeSqueezer, &[0.7, 0.2], &[0, 1])
        .unwrap()
        .apply_gate(GateKind::Displacement, &[0.3, -0.1], &[0])
        .unwrap();
    let probs = state.pattern_probabilities(&det, &[0, 1]);
    let total: f64 = probs.iter().sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn paths_agree_on_random_circuits() {
    // A faster version of the full acceptance sweep: 40 circuits, both
    // detector efficiencies used there.
    for eta in [1.0, 0.8] {
        let det = DetectorModel::new(eta, 0.0).unwrap();
        let (pattern_gap, herald_gap) = testkit::run_comparison(42, 40, &det).unwrap();
        assert!(
            pattern_gap < 1e-6,
            "worst pattern gap {pattern_gap} at η={eta}"
        );
        assert!(
            herald_gap < 1e-6,
            "worst herald gap {herald_gap} at η={eta}"
        );
    }
}
