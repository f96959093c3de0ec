use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn polysu11(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polysu11"))
        .args(args)
        .current_dir(dir)
        .env_remove("POLYSU11_TOL")
        .output()
        .unwrap()
}

#[test]
fn verify_linear_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = polysu11(&["verify", "--p", "1", "--alpha", "1", "--k", "1", "--trunc", "32", "--json", "r.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    let checks = report["checks"].as_array().unwrap();
    for criterion in 1..=10 {
        let n = checks.iter().filter(|c| c["criterion"] == criterion).count();
        assert_eq!(n, 1, "criterion {criterion}");
    }
    for c in checks {
        let pass = c["value"].as_f64().unwrap() <= c["tolerance"].as_f64().unwrap();
        assert_eq!(c["pass"].as_bool().unwrap(), pass);
        assert!(pass, "{c}");
    }
    assert_eq!(report["spec"]["alpha"][0], 1.0);
    assert!(report["environment"]["seed"].is_u64());
    assert!(report["environment"]["version"].is_string());
}

#[test]
fn verify_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = |name: &'static str| {
        ["verify", "--p", "2", "--alpha", "1,0.5", "--k", "0.6", "--gamma", "0.4", "--json", name]
    };
    assert!(polysu11(&args("a.json"), dir.path()).status.success());
    assert!(polysu11(&args("b.json"), dir.path()).status.success());
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn verify_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["verify", "--p", "1", "--alpha", "-1", "--k", "1", "--trunc", "32", "--json", "r.json"],
        vec!["verify", "--p", "2", "--alpha", "1", "--k", "1", "--json", "r.json"],
        vec!["verify", "--p", "1", "--alpha", "1", "--k", "0", "--json", "r.json"],
        vec!["verify", "--gamma", "0.7", "--json", "r.json"],
        vec!["verify", "--alpha", "1", "--k", "1", "--trunc", "2", "--json", "r.json"],
        vec!["spectrum", "--gamma", "abc"],
        vec!["states", "--family", "bg", "--zeta", "1", "--alpha", "1", "--k", "1"],
        vec!["frobnicate"],
    ] {
        let out = polysu11(&args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn tolerance_override_can_fail_a_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_polysu11"))
        .args(["verify", "--p", "3", "--alpha", "1,0.5,0.25", "--k", "1.5", "--json", "r.json"])
        .current_dir(dir.path())
        .env("POLYSU11_TOL", "1e-300")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["environment"]["tolerances"]["algebra"], 1e-300);
    let fidelity = report["checks"].as_array().unwrap().iter().find(|c| c["criterion"] == 1).unwrap();
    assert_eq!(fidelity["pass"], false);
}

#[test]
fn weights_table_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = polysu11(
        &["weights", "--family", "bg", "--gamma", "0.1,0.25,0.4", "--tmax", "20", "--steps", "400", "--out", "w.csv"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("w.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("gamma,t,rho"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 1200);
    assert!(rows.iter().all(|r| r[2] >= 0.0));
    assert_eq!(rows[0][1], 1e-3);
    assert_eq!(rows[399][1], 20.0);
}

#[test]
fn states_csv_is_normalized() {
    let dir = tempfile::tempdir().unwrap();
    let out = polysu11(
        &["states", "--family", "p", "--zeta", "0.3,-0.2", "--p", "1", "--alpha", "1", "--k", "1", "--out", "s.csv"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert!(text.starts_with("n,re,im,abs2\n"));
    let norm: f64 = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((norm - 1.0).abs() < 1e-13);
    // c_0 = (1 - |η|²)^k for the undeformed Perelomov state
    let c0: f64 = text.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((c0 - 0.87).abs() < 1e-14);

    let stdout = polysu11(&["states", "--family", "bg", "--zeta", "1,0", "--gamma", "0.25"], dir.path());
    assert!(stdout.status.success());
    assert!(String::from_utf8(stdout.stdout).unwrap().starts_with("n,re,im,abs2"));
}

#[test]
fn states_outside_disk_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = polysu11(&["states", "--family", "p", "--zeta", "1.5,0", "--alpha", "1", "--k", "1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spectrum_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = polysu11(&["spectrum", "--gamma", "0.25", "--levels", "4", "--out", "s.json"], dir.path());
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    assert_eq!(v["gamma"], 0.25);
    assert_eq!(v["epsilon"], -0.75);
    let levels = v["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 4);
    for (n, l) in levels.iter().enumerate() {
        let want = 2.0 * n as f64 + 1.75;
        assert_eq!(l["n"], n);
        assert_eq!(l["analytic"].as_f64().unwrap(), want);
        for key in ["grid_plus", "grid_minus"] {
            assert!((l[key].as_f64().unwrap() - want).abs() < 1e-3);
        }
    }
}
