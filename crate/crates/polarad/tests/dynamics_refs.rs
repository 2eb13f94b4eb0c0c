//! Reference values for the time evolution and decay-time fits.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use polarad::coupling::{build_matrices, evolution_matrix};
use polarad::dynamics::{
    decay_trace, drive_vector, evolve, expm, fitted_decay_time, fluorescence, steady_state,
};
use polarad::{AtomArray, BuildOptions, DetuningConvention, DriveDirection};

fn weak_drive(n: usize, kd: f64) -> Array1<Complex64> {
    drive_vector(DriveDirection::NormalZ, 1e-3, n, kd)
}

/// The flagship free-space number: five atoms at kd = 1 driven at
/// Delta = 10 Gamma decay collectively with tau about half the
/// single-atom lifetime.
#[test]
fn free_chain_fitted_decay_time_frozen() {
    let array = AtomArray::line(5, 1.0, 0.0);
    let mats = build_matrices(&array, None, &BuildOptions::default()).unwrap();
    let m = evolution_matrix(&mats, 10.0, DetuningConvention::FromShifted);
    let beta0 = steady_state(&m, &weak_drive(5, 1.0)).unwrap();
    let fit = fitted_decay_time(&m, &mats.gamma, &beta0).unwrap();
    assert!((fit.window_end - 1.0).abs() < 1e-12, "free-space window is one lifetime");
    assert!((fit.tau - 0.4931).abs() < 5e-4, "tau {}", fit.tau);
}

#[test]
fn single_atom_decays_at_the_bare_rate_regardless_of_drive() {
    for direction in [DriveDirection::NormalZ, DriveDirection::AlongY] {
        let array = AtomArray::line(1, 0.0, 0.0);
        let mats = build_matrices(&array, None, &BuildOptions::default()).unwrap();
        let m = evolution_matrix(&mats, 3.0, DetuningConvention::FromShifted);
        let omega = drive_vector(direction, 2e-3, 1, 0.0);
        let beta0 = steady_state(&m, &omega).unwrap();
        let fit = fitted_decay_time(&m, &mats.gamma, &beta0).unwrap();
        assert!((fit.tau - 1.0).abs() < 1e-9);
    }
}

#[test]
fn drive_phase_gradient_only_for_in_plane_illumination() {
    let normal = drive_vector(DriveDirection::NormalZ, 1e-3, 4, 1.3);
    for a in 0..4 {
        assert_eq!(normal[a], Complex64::new(1e-3, 0.0));
    }
    let along = drive_vector(DriveDirection::AlongY, 1e-3, 4, 1.3);
    for a in 0..4 {
        let want = Complex64::new(0.0, 1.3 * a as f64).exp() * 1e-3;
        assert!((along[a] - want).norm() < 1e-15);
        assert!((along[a].norm() - 1e-3).abs() < 1e-15);
    }
}

#[test]
fn steady_state_is_linear_in_the_drive() {
    let array = AtomArray::line(3, 1.0, 0.5);
    let eps = Complex64::new(-0.95, 0.11);
    let mats = build_matrices(&array, Some(eps), &BuildOptions::default()).unwrap();
    let m = evolution_matrix(&mats, 10.0, DetuningConvention::FromShifted);
    let b1 = steady_state(&m, &weak_drive(3, 1.0)).unwrap();
    let b2 = steady_state(&m, &(weak_drive(3, 1.0) * Complex64::new(2.0, 0.0))).unwrap();
    for a in 0..3 {
        assert!((b2[a] - 2.0 * b1[a]).norm() < 1e-12 * b1[a].norm());
    }
    let p1 = fluorescence(&mats.gamma, &b1);
    let p2 = fluorescence(&mats.gamma, &b2);
    assert!((p2 / p1 - 4.0).abs() < 1e-9, "power is quadratic in the drive");
}

#[test]
fn emitted_power_equals_excitation_loss_rate() {
    // P = -d/dt sum |beta|^2 checked against a centered difference
    let array = AtomArray::line(4, 1.0, 0.25);
    let eps = Complex64::new(-0.95, 0.11);
    let mats = build_matrices(&array, Some(eps), &BuildOptions::default()).unwrap();
    let m = evolution_matrix(&mats, 10.0, DetuningConvention::FromShifted);
    let beta0 = steady_state(&m, &weak_drive(4, 1.0)).unwrap();
    let t = 0.013;
    let dt = 1e-7;
    let states = evolve(&m, &beta0, &[t - dt, t, t + dt]).unwrap();
    let norm_sq = |s: &Array1<Complex64>| s.iter().map(|b| b.norm_sqr()).sum::<f64>();
    let numeric = -(norm_sq(&states[2]) - norm_sq(&states[0])) / (2.0 * dt);
    let p = fluorescence(&mats.gamma, &states[1]);
    assert!(
        (numeric - p).abs() < 1e-5 * p.abs(),
        "numeric {numeric} vs fluorescence {p}"
    );
}

#[test]
fn evolve_agrees_with_direct_matrix_exponential() {
    // a non-normal matrix with surface couplings exercises both the
    // eigendecomposition path and the scaling-and-squaring fallback
    let array = AtomArray::line(3, 0.7, 0.25);
    let eps = Complex64::new(-0.95, 0.11);
    let mats = build_matrices(&array, Some(eps), &BuildOptions::default()).unwrap();
    let m = evolution_matrix(&mats, 10.0, DetuningConvention::FromShifted);
    let beta0 = steady_state(&m, &weak_drive(3, 0.7)).unwrap();
    for t in [0.0, 0.003, 0.02, 0.1] {
        let via_evolve = evolve(&m, &beta0, &[t]).unwrap();
        let propagator = expm(&(&m * Complex64::new(t, 0.0))).unwrap();
        let direct: Array1<Complex64> = propagator.dot(&beta0);
        for a in 0..3 {
            assert!(
                (via_evolve[0][a] - direct[a]).norm() < 1e-10 * beta0[a].norm().max(1e-12),
                "t={t} atom {a}"
            );
        }
    }
}

#[test]
fn decay_trace_is_positive_and_monotone_for_a_single_atom() {
    let array = AtomArray::line(1, 0.0, 0.0);
    let mats = build_matrices(&array, None, &BuildOptions::default()).unwrap();
    let m = evolution_matrix(&mats, 10.0, DetuningConvention::FromShifted);
    let beta0 = steady_state(&m, &weak_drive(1, 0.0)).unwrap();
    let ts: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
    let ps = decay_trace(&m, &mats.gamma, &beta0, &ts).unwrap();
    for w in ps.windows(2) {
        assert!(w[1] > 0.0 && w[1] < w[0]);
    }
}

#[test]
fn expm_reproduces_a_jordan_like_block() {
    // defective-direction stress: exp of [[a, 1], [0, a]] has t e^{a} in
    // the corner; the eigen route cannot produce this, the Pade route must
    let a = Complex64::new(-0.3, 0.9);
    let mut m = Array2::zeros((2, 2));
    m[[0, 0]] = a;
    m[[0, 1]] = Complex64::new(1.0, 0.0);
    m[[1, 1]] = a;
    let e = expm(&m).unwrap();
    let ea = a.exp();
    assert!((e[[0, 0]] - ea).norm() < 1e-13);
    assert!((e[[1, 1]] - ea).norm() < 1e-13);
    assert!((e[[0, 1]] - ea).norm() < 1e-13);
    assert!(e[[1, 0]].norm() < 1e-15);
}
