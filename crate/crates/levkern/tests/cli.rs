//! End-to-end checks of the command-line interface: config validation,
//! exit codes, artifact formats, and determinism.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_levkern")
}

fn tmp_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("levkern-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(name: &str, text: &str) -> PathBuf {
    let path = tmp_dir().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

const REL_CONFIG: &str = r#"{
    "versions": {"config": 1},
    "model": {"dim": 1, "profile": {"kind": "relativistic_stable", "beta": 1.0, "m": 1.0}},
    "psi": {"xi": [0.0, 1.0]},
    "gamma_sweep": {"alphas": [0.5, 1.0, 2.0]},
    "resolvent": {"alpha": 0.5, "points": [2.0, 5.0]},
    "heat": {"t": 1.0, "points": [0.0, 1.0, 2.0]}
}"#;

#[test]
fn psi_rows_match_closed_form() {
    let cfg = write_config("psi.json", REL_CONFIG);
    let out = run(&["psi", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "xi,psi,error");
    let row0: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row0[1].parse::<f64>().unwrap(), 0.0);
    let row1: Vec<&str> = lines.next().unwrap().split(',').collect();
    let psi1: f64 = row1[1].parse().unwrap();
    assert!((psi1 - (2.0_f64.sqrt() - 1.0)).abs() < 1e-12);
}

#[test]
fn empty_xi_list_gives_header_only() {
    let cfg = write_config(
        "empty.json",
        &REL_CONFIG.replace("\"xi\": [0.0, 1.0]", "\"xi\": []"),
    );
    let out = run(&["psi", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "xi,psi,error\n");
}

#[test]
fn malformed_json_exits_2() {
    let cfg = write_config("broken.json", "{not json");
    let out = run(&["psi", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn unknown_key_exits_2() {
    let cfg = write_config("unk.json", &REL_CONFIG.replace("\"psi\"", "\"psy\""));
    let out = run(&["psi", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gamma_sweep_matches_closed_form() {
    let cfg = write_config("gamma.json", REL_CONFIG);
    let out = run(&["gamma-sweep", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    for row in &rows {
        // rate saturates at kappa = 1 once alpha exceeds omega* = 1
        let a = row[0];
        let exact = if a <= 1.0 { (2.0 * a - a * a).sqrt() } else { 1.0 };
        assert!((row[1] - exact).abs() < 1e-6, "{row:?}");
        assert!((row[2] - 1.0).abs() < 1e-6); // omega_star
    }
}

#[test]
fn subexponential_gamma_sweep_exits_4() {
    let cfg = write_config(
        "sub.json",
        r#"{
            "versions": {"config": 1},
            "model": {"dim": 1, "profile": {"kind": "tempered_stable", "beta": 1.0, "kappa": 1.0, "eta": 0.5, "delta": 0.0}},
            "gamma_sweep": {"alphas": [0.5]}
        }"#,
    );
    let out = run(&["gamma-sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn resolvent_both_emits_diff_column() {
    let cfg = write_config("res.json", REL_CONFIG);
    let out = run(&[
        "resolvent",
        "--config",
        cfg.to_str().unwrap(),
        "--method",
        "both",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x,g_freq,g_time,rel_diff");
    for line in lines {
        let cols: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(cols.len(), 4);
        assert!(cols[3] < 1e-4, "routes disagree: {line}");
    }
}

#[test]
fn deterministic_output_files() {
    let cfg = write_config("det.json", REL_CONFIG);
    let out1 = tmp_dir().join("a.csv");
    let out2 = tmp_dir().join("b.csv");
    for path in [&out1, &out2] {
        let out = run(&[
            "heat",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(fs::read(&out1).unwrap(), fs::read(&out2).unwrap());
}

#[test]
fn boundstate_null_for_zero_potential() {
    let cfg = write_config(
        "v0.json",
        r#"{
            "versions": {"config": 1},
            "model": {"dim": 1, "profile": {"kind": "pure_stable", "beta": 1.0}},
            "boundstate": {
                "potential": {"kind": "tabulated", "grid": [-1.0, 0.0, 1.0], "values": [0.0, 0.0, 0.0]},
                "half_width": 5.0,
                "n": 50
            }
        }"#,
    );
    let out = run(&["boundstate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("boundstate output must be JSON");
    assert!(v["bound_state"].is_null());
}

#[test]
fn classify_reports_exponential_class() {
    let cfg = write_config(
        "cls.json",
        r#"{
            "versions": {"config": 1},
            "model": {"dim": 1, "profile": {"kind": "relativistic_stable", "beta": 1.0, "m": 1.0}},
            "classify": {"probe_radii": [1.0, 10.0, 100.0, 1000.0, 10000.0]}
        }"#,
    );
    let out = run(&["classify", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["class"], "exponential");
    assert!((v["kappa"].as_f64().unwrap() - 1.0).abs() < 1e-3);
}

#[test]
fn missing_block_exits_2() {
    let cfg = write_config(
        "nop.json",
        r#"{
            "versions": {"config": 1},
            "model": {"dim": 1, "profile": {"kind": "pure_stable", "beta": 1.0}}
        }"#,
    );
    let out = run(&["kf", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
