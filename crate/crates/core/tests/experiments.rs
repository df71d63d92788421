mod common;

use arrayg2_core::experiments::{run, write_dataset, Command, DriveSpec, GeometrySpec, Method, RunConfig};
use arrayg2_core::master::DetectionKind;
use arrayg2_core::Error;
use common::oracle::{coupling, FullSystem};
use nalgebra::DMatrix;
use num_complex::Complex64;

fn square(n_side: usize, spacing: f64) -> GeometrySpec {
    GeometrySpec::Square { n_side, spacing }
}

fn line(count: usize, spacing: f64) -> GeometrySpec {
    GeometrySpec::Line { count, spacing }
}

fn small(geometry: GeometrySpec) -> RunConfig {
    let mut cfg = RunConfig { geometry, ..Default::default() };
    cfg.sweep.spacings = vec![0.4];
    cfg
}

#[test]
fn empty_spacing_list_gives_empty_dataset() {
    let mut cfg = small(square(5, 0.4));
    cfg.sweep.spacings.clear();
    for command in [Command::Fig1, Command::Fig3] {
        let data = run(command, &cfg).unwrap();
        assert!(data.is_empty());
        let dir = tempfile::tempdir().unwrap();
        let files = write_dataset(&data, &cfg, dir.path()).unwrap();
        assert_eq!(files.len(), 2);
        let text = std::fs::read_to_string(&files[0]).unwrap();
        assert_eq!(text.lines().count(), 1, "header only");
    }
}

#[test]
fn fig1_two_atoms_match_oracle() {
    let mut cfg = small(line(2, 0.4));
    cfg.sweep.spacings = vec![0.3, 0.7];
    let data = run(Command::Fig1, &cfg).unwrap();
    let t = data.table("fig1").unwrap();
    assert_eq!(t.rows.len(), 2);
    for (k, &d) in [0.3, 0.7].iter().enumerate() {
        let pos = [[0.0, 0.0, 0.0], [d, 0.0, 0.0]];
        let sys = FullSystem::new(&pos, &[Complex64::new(0.0, 0.0); 2], 0.0);
        // |ee⟩ is the only double mode; its decay rate is 2 Re(G_11 + G_22).
        let gamma = 4.0 * coupling(pos[0], pos[0]).re;
        let mut rho = DMatrix::zeros(4, 4);
        rho[(3, 3)] = Complex64::new(1.0, 0.0);
        let zeta = sys.jump(&sys.jump(&rho)).trace().re / gamma;
        assert!((t.floats("gamma_beta").unwrap()[k] - gamma).abs() < 1e-12);
        assert!((t.floats("zeta_beta").unwrap()[k] - zeta).abs() < 1e-10, "{zeta}");
    }
}

#[test]
fn fig1_needs_a_lattice() {
    let cfg = small(GeometrySpec::Inline(arrayg2_core::geometry::ArrayFile {
        positions: vec![[0.0; 3], [0.5, 0.0, 0.0]],
        dipole: None,
    }));
    let err = run(Command::Fig1, &cfg).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn fig2_peak_at_small_mismatch() {
    let data = run(Command::Fig2, &small(square(5, 0.4))).unwrap();
    let peak = data.metadata["peak_mismatch"].as_f64().unwrap();
    assert!(peak.abs() < 0.5, "{peak}");
    assert_eq!(data.table("fig2_x").unwrap().rows.len(), 25 * 300);
    assert_eq!(data.table("fig2_l").unwrap().rows.len(), 300 * 300);
}

#[test]
fn fig2_two_atoms_single_point_per_mode() {
    let data = run(Command::Fig2, &small(line(2, 0.4))).unwrap();
    assert_eq!(data.table("fig2_x").unwrap().rows.len(), 2);
    assert_eq!(data.table("fig2_l").unwrap().rows.len(), 1);
}

#[test]
fn fig3_methods_agree() {
    let mut cfg = small(square(2, 0.4));
    cfg.method = Method::Both;
    let data = run(Command::Fig3, &cfg).unwrap();
    let t = data.table("fig3").unwrap();
    assert_eq!(t.rows.len(), 4);
    for col in ["rel_diff_same_mode", "rel_diff_free_space"] {
        for x in t.floats(col).unwrap() {
            assert!(x < 1e-4, "{col}: {x}");
        }
    }
    assert_eq!(data.metadata["uncorrelated_reference"].as_f64().unwrap(), 0.75);
}

#[test]
fn fig3_superradiant_modes_near_uncorrelated() {
    let data = run(Command::Fig3, &small(square(5, 0.4))).unwrap();
    let t = data.table("fig3").unwrap();
    let gamma = t.floats("gamma_alpha").unwrap();
    let same = t.floats("g2_same_mode").unwrap();
    let free = t.floats("g2_free_space").unwrap();
    let bright: Vec<usize> = (0..gamma.len()).filter(|&a| gamma[a] > 2.0).collect();
    assert!(!bright.is_empty());
    for a in bright {
        assert!((0.8..=1.1).contains(&same[a]), "same-mode {a}: {}", same[a]);
        assert!((0.8..=1.1).contains(&free[a]), "free-space {a}: {}", free[a]);
    }
    // The darkest mode radiates bunched light into free space.
    assert!(free[0] > 1.0, "{}", free[0]);
}

#[test]
fn fig4_reduction_extrema_and_refinement() {
    let mut cfg = small(square(5, 0.4));
    cfg.sweep.fixed_amplitudes = vec![0.0, 1.0];
    let coarse = run(Command::Fig4, &cfg).unwrap();
    let curves = coarse.table("fig4a").unwrap();
    let amps = curves.floats("A").unwrap();
    let g2 = curves.floats("g2_zero").unwrap();
    let flat: Vec<f64> = amps.iter().zip(&g2).filter(|(a, _)| **a == 0.0).map(|(_, g)| *g).collect();
    assert_eq!(flat.len(), 129);
    assert!(flat.iter().all(|g| (g - flat[0]).abs() <= 1e-12 * flat[0]));

    let lo = coarse.metadata["g2_min"].as_f64().unwrap();
    let hi = coarse.metadata["g2_max"].as_f64().unwrap();
    assert!(lo <= 1e-3 && hi >= 3.0, "{lo} {hi}");

    cfg.sweep.phi_steps *= 2;
    cfg.sweep.amplitude_steps = 2 * cfg.sweep.amplitude_steps - 1;
    let fine = run(Command::Fig4, &cfg).unwrap();
    let hi_fine = fine.metadata["g2_max"].as_f64().unwrap();
    let lo_fine = fine.metadata["g2_min"].as_f64().unwrap();
    assert!((hi_fine - hi).abs() < 0.1 * hi, "{hi} {hi_fine}");
    // The minimum is a zero of the amplitude; refinement may only push it further down.
    assert!(lo_fine <= lo * 1.1 && lo_fine <= 1e-3, "{lo} {lo_fine}");
}

#[test]
fn reruns_are_byte_identical() {
    let mut cfg = small(square(3, 0.5));
    cfg.method = Method::Both;
    cfg.sweep.phi_steps = 8;
    cfg.sweep.fixed_amplitudes = vec![0.5];
    let mut outputs = Vec::new();
    for jobs in [1, 4] {
        cfg.jobs = Some(jobs);
        let data = run(Command::Fig4, &cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let files = write_dataset(&data, &cfg, dir.path()).unwrap();
        let csv: Vec<String> = files
            .iter()
            .filter(|f| f.extension().is_some_and(|e| e == "csv"))
            .map(|f| std::fs::read_to_string(f).unwrap())
            .collect();
        outputs.push(csv);
    }
    assert_eq!(outputs[0], outputs[1]);
    let csv = &outputs[0][0];
    let hash = cfg.hash();
    assert!(csv.lines().skip(1).all(|l| l.ends_with(&hash)));
}

#[test]
fn g2tau_decorrelates_and_methods_agree() {
    let mut cfg = small(line(3, 0.4));
    cfg.method = Method::Both;
    cfg.drive = DriveSpec::Eigenmode { omega0: 1e-4, mode: 0 };
    cfg.sweep.taus = (0..=40).map(|k| k as f64 * 2.0).collect();
    let data = run(Command::G2Tau, &cfg).unwrap();
    let t = data.table("g2tau").unwrap();
    let a = t.floats("g2").unwrap();
    let m = t.floats("g2_master").unwrap();
    assert!(a[0] < 1.0);
    for (x, y) in a.iter().zip(&m) {
        assert!((x - y).abs() < 1e-4 * x.max(1e-2), "{x} {y}");
    }
    assert!((m.last().unwrap() - 1.0).abs() < 0.01, "{}", m.last().unwrap());
}

#[test]
fn g2tau_rejects_delayed_free_space() {
    let mut cfg = small(line(2, 0.4));
    cfg.detector = Some(DetectionKind::FreeSpace);
    cfg.drive = DriveSpec::Eigenmode { omega0: 1e-4, mode: -1 };
    cfg.sweep.taus = vec![0.0, 1.0];
    assert!(matches!(run(Command::G2Tau, &cfg), Err(Error::Config(_))));
    cfg.sweep.taus = vec![0.0];
    let data = run(Command::G2Tau, &cfg).unwrap();
    assert_eq!(data.table("g2tau").unwrap().rows.len(), 1);
}

#[test]
fn strong_drive_is_a_config_error() {
    let mut cfg = small(line(2, 0.4));
    cfg.drive = DriveSpec::Eigenmode { omega0: 10.0, mode: 0 };
    let err = run(Command::G2Tau, &cfg).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn modes_and_overlaps_tables() {
    let mut cfg = small(square(3, 0.5));
    let modes = run(Command::Modes, &cfg).unwrap();
    assert_eq!(modes.table("modes_single").unwrap().rows.len(), 9);
    assert_eq!(modes.table("modes_double").unwrap().rows.len(), 36);
    let gamma = modes.table("modes_single").unwrap().floats("gamma").unwrap();
    assert!(gamma.windows(2).all(|w| w[0] <= w[1]));
    // Γ·N is the trace of 2 Re G.
    assert!((gamma.iter().sum::<f64>() - 9.0).abs() < 1e-10);

    cfg.sweep.modes = Some(vec![0, -1]);
    let x = run(Command::Overlaps, &cfg).unwrap();
    let t = x.table("overlaps_x").unwrap();
    assert_eq!(t.rows.len(), 2 * 36);
    assert_eq!(t.floats("alpha").unwrap()[36], 8.0);
}
