use std::path::Path;
use std::process::{Command, Output};

fn arrayg2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arrayg2")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.json");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn modes_with_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = arrayg2(&["modes", "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let single = std::fs::read_to_string(out_dir.join("modes_single.csv")).unwrap();
    assert_eq!(single.lines().count(), 26);
    assert!(single.starts_with("alpha,gamma,delta,config_hash\n"));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("modes_manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "modes");
    assert_eq!(manifest["tables"][1]["rows"], 300);
    assert_eq!(manifest["config"]["geometry"]["n_side"], 5);
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"geometry": {"kind": "square", "n_side": 3, "spacing": 0.4},
            "sweep": {"spacings": [0.4, 0.6]}}"#,
    );
    let mut csv = Vec::new();
    for (k, jobs) in ["1", "3"].iter().enumerate() {
        let out_dir = dir.path().join(format!("run{k}"));
        let out = arrayg2(&["fig3", "--config", &cfg, "--out", out_dir.to_str().unwrap(), "--jobs", jobs]);
        assert!(out.status.success(), "{}", stderr(&out));
        csv.push(std::fs::read(out_dir.join("fig3.csv")).unwrap());
    }
    assert_eq!(csv[0], csv[1]);
    assert_eq!(String::from_utf8(csv[0].clone()).unwrap().lines().count(), 1 + 2 * 9);
}

#[test]
fn geometry_file_is_ingested() {
    let dir = tempfile::tempdir().unwrap();
    let geometry = dir.path().join("atoms.json");
    std::fs::write(&geometry, r#"{"positions": [[0,0,0],[0.4,0,0],[0,0,0.5]], "dipole": [0,0,0,0,1,0]}"#).unwrap();
    let out_dir = dir.path().join("out");
    let out = arrayg2(&["overlaps", "--geometry", geometry.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(out_dir.join("overlaps_x.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 3);
}

#[test]
fn empty_sweep_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"sweep": {"spacings": []}}"#);
    let out_dir = dir.path().join("out");
    let out = arrayg2(&["fig1", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(out_dir.join("fig1.csv")).unwrap();
    assert_eq!(text, "d,beta,gamma_beta,zeta_beta,config_hash\n");
}

#[test]
fn invalid_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"geometry": {"kind": "hexagon"}}"#);
    let out = arrayg2(&["modes", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));

    let cfg = write_config(dir.path(), r#"{"geometry": {"kind": "square", "n_side": 6, "spacing": 0.4}}"#);
    let out = arrayg2(&["fig3", "--config", &cfg, "--method", "master"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("limited to 25 atoms"), "{}", stderr(&out));

    let out = arrayg2(&["modes", "--method", "sometimes"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"geometry": {"kind": "line", "count": 2, "spacing": 0.4},
            "drive": {"kind": "eigenmode", "omega0": 1e-4, "mode": 0},
            "integrator": {"dt": 50.0},
            "sweep": {"taus": [0, 100]}}"#,
    );
    let out_dir = dir.path().join("out");
    let out = arrayg2(&["g2tau", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}
