//! End-to-end tests of the `cscat` binary: exit codes, the malformed-config
//! corpus, and byte-level determinism of emitted files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn cscat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cscat"))
        .args(args)
        .env("CSCAT_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cscat-test-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {path:?}: {e}"))
}

fn stderr_class(out: &Output) -> String {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().unwrap_or("");
    let v: serde_json::Value = serde_json::from_str(line)
        .unwrap_or_else(|_| panic!("stderr not machine readable: {text}"));
    v["error_class"].as_str().unwrap_or("").to_string()
}

#[test]
fn det_scan_is_deterministic_and_zeros_match() {
    let d1 = tmp_dir("det1");
    let d2 = tmp_dir("det2");
    for d in [&d1, &d2] {
        let out = cscat(&[
            "det-scan",
            "--samples",
            "500",
            "--l-max",
            "5",
            "--out",
            d.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let csv1 = read(&d1.join("det_scan.csv"));
    let csv2 = read(&d2.join("det_scan.csv"));
    assert_eq!(csv1, csv2, "det-scan output not byte-identical");
    let manifest: serde_json::Value =
        serde_json::from_str(&read(&d1.join("manifest.json"))).unwrap();
    assert_eq!(manifest["command"], "det-scan");
    assert!(manifest["config_hash"].as_str().unwrap().len() == 16);

    // the emitted determinant columns vanish exactly where the enumerated
    // zero set says they should
    let zero_set: serde_json::Value = serde_json::from_str(&read(&d1.join("zero_set.json"))).unwrap();
    let steps = zero_set["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 6);
    // spot check: step 0 vanishes only at 1/2 pi
    assert_eq!(steps[0]["zeros_pi_fractions"][0][0], 1);
    assert_eq!(steps[0]["zeros_pi_fractions"][0][1], 2);
    let _ = std::fs::remove_dir_all(&d1);
    let _ = std::fs::remove_dir_all(&d2);
}

#[test]
fn invis_scan_empty_preset_is_dark_and_deterministic() {
    let d1 = tmp_dir("inv1");
    let d2 = tmp_dir("inv2");
    for d in [&d1, &d2] {
        let out = cscat(&[
            "invis-scan",
            "--scatterer",
            "preset:empty",
            "--k-grid",
            "0.5,1,2",
            "--out",
            d.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(read(&d1.join("scan.csv")), read(&d2.join("scan.csv")));
    let scan: serde_json::Value = serde_json::from_str(&read(&d1.join("scan.json"))).unwrap();
    for row in scan["rows"].as_array().unwrap() {
        assert!(row["farfield_norm"].as_f64().unwrap() < 1e-8);
    }
    let _ = std::fs::remove_dir_all(&d1);
    let _ = std::fs::remove_dir_all(&d2);
}

#[test]
fn farfield_runs_on_disk_preset() {
    let d = tmp_dir("ff");
    let out = cscat(&[
        "farfield",
        "--scatterer",
        "preset:unit-disk",
        "--out",
        d.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = read(&d.join("farfield.csv"));
    assert!(csv.starts_with("theta,re_u_inf,im_u_inf\n"));
    assert_eq!(csv.lines().count(), 257);
    let _ = std::fs::remove_dir_all(&d);
}

#[test]
fn solve_reports_trivial_medium() {
    let d = tmp_dir("solve-empty");
    let out = cscat(&[
        "solve",
        "--scatterer",
        "preset:empty",
        "--k",
        "2.0",
        "--out",
        d.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&read(&d.join("solution.json"))).unwrap();
    assert_eq!(summary["trivial_medium"], true);
    assert_eq!(summary["scattered_l2"].as_f64().unwrap(), 0.0);
    let _ = std::fs::remove_dir_all(&d);
}

#[test]
fn solve_runs_fem_on_disk() {
    let d = tmp_dir("solve-disk");
    let out = cscat(&[
        "solve",
        "--scatterer",
        "preset:unit-disk",
        "--rt",
        "2.0",
        "--h",
        "0.25",
        "--out",
        d.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&read(&d.join("solution.json"))).unwrap();
    assert!(summary["relative"].as_f64().unwrap() > 0.01);
    assert!(d.join("mesh.txt").exists());
    let _ = std::fs::remove_dir_all(&d);
}

#[test]
fn malformed_configs_exit_1() {
    let d = tmp_dir("bad");
    let out_arg = d.to_str().unwrap().to_string();
    let bad_file = d.join("bad.toml");
    std::fs::create_dir_all(&d).unwrap();

    let cases: Vec<Vec<String>> = vec![
        // unknown preset
        vec!["farfield", "--scatterer", "preset:nonsense", "--k", "2", "--out", &out_arg]
            .into_iter()
            .map(String::from)
            .collect(),
        // missing file
        vec!["farfield", "--scatterer", "/no/such/file.toml", "--k", "2", "--out", &out_arg]
            .into_iter()
            .map(String::from)
            .collect(),
        // no wavenumber anywhere
        vec!["farfield", "--scatterer", "preset:empty", "--out", &out_arg]
            .into_iter()
            .map(String::from)
            .collect(),
        // bad method
        vec![
            "farfield", "--scatterer", "preset:empty", "--k", "2", "--method", "magic", "--out",
            &out_arg,
        ]
        .into_iter()
        .map(String::from)
        .collect(),
        // beta outside (0, pi)
        vec!["ucp-verify", "--beta", "3.5", "--out", &out_arg]
            .into_iter()
            .map(String::from)
            .collect(),
        // inverted det-scan range
        vec![
            "det-scan", "--beta-min", "2.0", "--beta-max", "1.0", "--out", &out_arg,
        ]
        .into_iter()
        .map(String::from)
        .collect(),
        // nonpositive k grid
        vec![
            "invis-scan", "--scatterer", "preset:empty", "--k-grid=-1.0", "--out", &out_arg,
        ]
        .into_iter()
        .map(String::from)
        .collect(),
    ];
    for case in &cases {
        let args: Vec<&str> = case.iter().map(|s| s.as_str()).collect();
        let out = cscat(&args);
        assert_eq!(
            out.status.code(),
            Some(1),
            "expected config exit for {case:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert_eq!(stderr_class(&out), "config", "case {case:?}");
    }

    // malformed TOML bodies
    let bodies = [
        "not toml at all [",
        "kind = \"sphere\"",
        "kind = \"nest\"",
        // clockwise polygon
        "kind = \"nest\"\n[[layers]]\nvertices = [[0.0,0.0],[0.0,1.0],[1.0,0.0]]\nq = { q0 = [1.0,0.0], q1 = [0.0,0.0], q2 = [0.0,0.0] }\n",
        // inner layer bigger than outer
        "kind = \"nest\"\n[[layers]]\nvertices = [[-0.5,-0.5],[0.5,-0.5],[0.5,0.5],[-0.5,0.5]]\nq = { q0 = [2.0,0.0], q1 = [0.0,0.0], q2 = [0.0,0.0] }\n[[layers]]\nvertices = [[-0.6,-0.6],[0.6,-0.6],[0.6,0.6],[-0.6,0.6]]\nq = { q0 = [2.0,0.0], q1 = [0.0,0.0], q2 = [0.0,0.0] }\n",
        // disk with increasing radii
        "kind = \"disk\"\nradii = [0.5, 1.0]\nq_values = [[2.0,0.0],[2.0,0.0]]\netas = [[0.0,0.0],[0.0,0.0]]\n",
    ];
    for body in bodies {
        std::fs::write(&bad_file, body).unwrap();
        let out = cscat(&[
            "farfield",
            "--scatterer",
            bad_file.to_str().unwrap(),
            "--k",
            "2",
            "--out",
            &out_arg,
        ]);
        assert_eq!(
            out.status.code(),
            Some(1),
            "expected config exit for body {body:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert_eq!(stderr_class(&out), "config");
    }
    let _ = std::fs::remove_dir_all(&d);
}

#[test]
fn solver_failures_exit_2() {
    let d = tmp_dir("solver-fail");
    // mesh too coarse for the wavenumber
    let out = cscat(&[
        "solve",
        "--scatterer",
        "preset:unit-disk",
        "--k",
        "2.0",
        "--h",
        "0.5",
        "--out",
        d.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stderr_class(&out), "solver");

    // separation of variables demanded for a polygon
    let out = cscat(&[
        "farfield",
        "--scatterer",
        "preset:nested-squares",
        "--method",
        "mie",
        "--out",
        d.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_class(&out), "solver");
    let _ = std::fs::remove_dir_all(&d);
}

#[test]
fn assertion_failures_exit_3() {
    let d = tmp_dir("assert");
    // right angle is singular at step 0
    let out = cscat(&[
        "ucp-verify",
        "--beta",
        "1.5707963267948966",
        "--expect-nonsingular",
        "--out",
        d.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stderr_class(&out), "assertion");

    // identical scatterers cannot differ
    let out = cscat(&[
        "diff",
        "--scatterer",
        "preset:unit-disk",
        "--scatterer2",
        "preset:unit-disk",
        "--assert-above",
        "1e-4",
        "--out",
        d.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_class(&out), "assertion");

    // the empty preset is dark everywhere
    let out = cscat(&[
        "invis-scan",
        "--scatterer",
        "preset:empty",
        "--k-grid",
        "1.0",
        "--assert-visible",
        "--out",
        d.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_class(&out), "assertion");
    let _ = std::fs::remove_dir_all(&d);
}

#[test]
fn ucp_verify_reports_forced_zero_for_irrational_opening() {
    let d = tmp_dir("ucp-ok");
    let out = cscat(&[
        "ucp-verify",
        "--beta",
        "2.2214414690791831",
        "--l-max",
        "6",
        "--expect-nonsingular",
        "--out",
        d.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&read(&d.join("ucp_report.json"))).unwrap();
    for step in report["steps"].as_array().unwrap() {
        assert_eq!(step["singular"], false);
        assert!(step["forced_residual"].as_f64().unwrap() < step["tolerance"].as_f64().unwrap());
    }
    // nonsingular steps also emit their tau sweep
    let sweep = read(&d.join("sweep_step_0.csv"));
    assert!(sweep.starts_with("tau,abs_exact,abs_leading\n"));
    assert_eq!(sweep.lines().count(), 10);
    let _ = std::fs::remove_dir_all(&d);
}

#[test]
fn preset_listing_and_unknown_name() {
    let out = cscat(&["preset"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("irrational-triangle"));
    let out = cscat(&["preset", "unknown-name"]);
    assert_eq!(out.status.code(), Some(1));
}
