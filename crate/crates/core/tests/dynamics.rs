//! Steady states and delayed correlations against independent references.

mod common;

use arrayg2_core::master::{
    default_step, g2_tau_from, g2_zero, g2_zero_freespace, steady_state_direct, steady_state_with, DetectionOperator,
    DirectOptions, DriveConfig, Liouvillian, SteadyStateOptions,
};
use arrayg2_core::{
    analytic_steady_state, build_line_array, build_square_array, g2_zero_single_mode, AtomArray, DoubleModeSet,
    GreensMatrices, OverlapTables, SingleModeSet,
};
use common::oracle::FullSystem;
use common::*;
use nalgebra::DVector;
use num_complex::Complex64;

struct Modes {
    array: AtomArray,
    g: GreensMatrices,
    s: SingleModeSet,
    d: DoubleModeSet,
}

fn modes(array: AtomArray) -> Modes {
    let g = GreensMatrices::new(&array);
    let s = SingleModeSet::new(&g).unwrap();
    let d = DoubleModeSet::new(&g).unwrap();
    Modes { array, g, s, d }
}

#[test]
fn single_atom_antibunches_then_decorrelates() {
    let g = GreensMatrices::new(&build_line_array(1, 1.0).unwrap());
    let drive = DriveConfig::custom(DVector::from_element(1, Complex64::new(0.01, 0.0)), 0.0);
    let liou = Liouvillian::new(&g, &drive).unwrap();
    let ss = steady_state_with(&liou, None, SteadyStateOptions::default()).unwrap();
    let det = DetectionOperator::from_coeffs(DVector::from_element(1, Complex64::new(1.0, 0.0)));
    let taus = [0.0, 1.0, 30.0];
    let g2 = g2_tau_from(&ss, &liou, &det, &det, &taus, 0.01).unwrap();
    assert_eq!(g2[0], 0.0);
    // Weak-drive two-level result: (1 - e^{-τ/2})².
    assert!((g2[1] - (1.0 - (-0.5f64).exp()).powi(2)).abs() < 1e-3, "{}", g2[1]);
    assert!((g2[2] - 1.0).abs() < 0.01, "{}", g2[2]);
}

#[test]
fn recovery_follows_mode_amplitude_relaxation() {
    let m = modes(build_square_array(2, 0.3).unwrap());
    let alpha = m.s.most_subradiant();
    let gamma = m.s.gamma[alpha];
    let drive = DriveConfig::eigenmode(&m.s, alpha, 1e-3 * gamma).unwrap();
    let liou = Liouvillian::new(&m.g, &drive).unwrap();
    let ss = steady_state_direct(&liou, &m.s, &m.d, None, DirectOptions::default()).unwrap();
    let det = DetectionOperator::adjoint_mode(&m.s, alpha).unwrap();
    let taus: Vec<f64> = (0..=6).map(|k| (4.0 + k as f64) / gamma).collect();
    let g2 = g2_tau_from(&ss, &liou, &det, &det, &taus, default_step(&m.d)).unwrap();
    // Least-squares slope of ln|g2 - 1| against τ.
    let ys: Vec<f64> = g2.iter().map(|g| (g - 1.0).abs().ln()).collect();
    let (tm, ym) = (taus.iter().sum::<f64>() / 7.0, ys.iter().sum::<f64>() / 7.0);
    let slope = taus.iter().zip(&ys).map(|(t, y)| (t - tm) * (y - ym)).sum::<f64>()
        / taus.iter().map(|t| (t - tm).powi(2)).sum::<f64>();
    let rate = -slope;
    assert!((rate - gamma / 2.0).abs() < 0.2 * gamma / 2.0, "rate {rate}, gamma {gamma}");
}

#[test]
fn evolved_eigenmode_coherence_matches_closed_form() {
    let m = modes(build_square_array(2, 0.5).unwrap());
    let alpha = m.s.most_superradiant();
    let drive = DriveConfig::eigenmode(&m.s, alpha, 1e-3 * m.s.gamma[alpha]).unwrap();
    let liou = Liouvillian::new(&m.g, &drive).unwrap();
    let ss = steady_state_with(&liou, None, SteadyStateOptions::default()).unwrap();
    let analytic = analytic_steady_state(&drive, &m.s, &m.d, &m.g.codec).unwrap();
    let evolved = (m.s.modes.column(alpha).transpose() * &ss.v)[(0, 0)];
    let err = (evolved - analytic.v_tilde[alpha]).norm() / analytic.v_tilde[alpha].norm();
    assert!(err < 1e-3, "{err}");
    for (k, z) in analytic.v_tilde.iter().enumerate().filter(|(k, _)| *k != alpha) {
        assert!(z.norm() < 1e-10 * analytic.v_tilde[alpha].norm(), "mode {k}: {z}");
    }
}

#[test]
fn closure_matches_master_for_random_arrays() {
    let mut r = rng(21);
    for n in [4, 5, 6] {
        let m = modes(random_array(&mut r, n, 0.3, 1.0));
        let drive = DriveConfig::plane_wave_unguarded(&m.array, 1e-3, [0.0, 1.0, 0.0], 0.0).unwrap();
        let liou = Liouvillian::new(&m.g, &drive).unwrap();
        let ss = steady_state_direct(&liou, &m.s, &m.d, None, DirectOptions::default()).unwrap();
        let closure = analytic_steady_state(&drive, &m.s, &m.d, &m.g.codec).unwrap();
        let ev = (&ss.v - &closure.v).norm() / closure.v.norm();
        let ew = (&ss.w - &closure.w).norm() / closure.w.norm();
        assert!(ev < 1e-3 && ew < 1e-3, "N={n}: v {ev:.2e}, w {ew:.2e}");
    }
}

#[test]
fn two_atom_symmetric_mode_matches_full_model() {
    let m = modes(build_line_array(2, 0.4).unwrap());
    let t = OverlapTables::new(&m.s, &m.d, &m.g.codec).unwrap();
    let alpha = (0..2).find(|&a| (m.s.modes[(0, a)] - m.s.modes[(1, a)]).norm() < 1e-8).expect("symmetric mode");
    let closed = g2_zero_single_mode(alpha, &m.s, &m.d, &t).unwrap();

    let coeffs: Vec<Complex64> = m.s.modes.column(alpha).iter().copied().collect();
    let omega: Vec<Complex64> = coeffs.iter().map(|c| c * 1e-3 * m.s.gamma[alpha]).collect();
    let full = FullSystem::new(m.array.positions(), &omega, m.s.delta[alpha]);
    let rho = full.steady_state();
    let s = full.collective(&coeffs);
    let reference = full.g2_zero(&rho, &s, &s);
    assert!(rel_err(closed, reference) < 1e-4, "{closed} vs {reference}");

    // Same number through the block pipeline.
    let drive = DriveConfig::eigenmode(&m.s, alpha, 1e-3 * m.s.gamma[alpha]).unwrap();
    let liou = Liouvillian::new(&m.g, &drive).unwrap();
    let ss = steady_state_direct(&liou, &m.s, &m.d, None, DirectOptions::default()).unwrap();
    let det = DetectionOperator::adjoint_mode(&m.s, alpha).unwrap();
    assert!(rel_err(g2_zero(&ss, &det, &det).unwrap(), reference) < 1e-4);
}

#[test]
fn distant_array_emits_nearly_uncorrelated_light() {
    let m = modes(build_square_array(5, 50.0).unwrap());
    let drive = DriveConfig::plane_wave(&m.array, &m.s, 1e-3, [0.0, 1.0, 0.0], 0.0).unwrap();
    let liou = Liouvillian::new(&m.g, &drive).unwrap();
    let ss = steady_state_direct(&liou, &m.s, &m.d, None, DirectOptions::default()).unwrap();
    let g2 = g2_zero_freespace(&ss, &m.g).unwrap();
    assert!((g2 - 0.96).abs() < 0.02 * 0.96, "{g2}");
}
