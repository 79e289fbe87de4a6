use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn wigner(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wigner"))
        .args(args)
        .arg("--out-dir")
        .arg(dir)
        .env_remove("WIGNER_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn column(csv: &str, name: &str) -> Vec<Option<f64>> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse::<f64>().ok()).collect()
}

fn crossings(r: &[f64], w: &[Option<f64>], lo: f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for k in 1..r.len() {
        if let (Some(a), Some(b)) = (w[k - 1], w[k]) {
            if r[k - 1] >= lo && r[k] <= hi && a.signum() != b.signum() {
                out.push(r[k - 1] + (r[k] - r[k - 1]) * a / (a - b));
            }
        }
    }
    out
}

#[test]
fn number_profile_rows_and_origin_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = wigner(dir.path(), &["profile", "--state", "number", "--n", "10", "--method", "exact", "--rmax", "4", "--points", "400"]);
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "r,W,method,stderr");
    assert_eq!(csv.lines().count(), 401);
    let w = column(&csv, "W");
    assert!((w[0].unwrap() - 2.0 / PI).abs() < 1e-15);
    let r: Vec<f64> = column(&csv, "r").into_iter().map(Option::unwrap).collect();
    assert!(r.windows(2).all(|p| p[1] > p[0]));
    let second = csv.lines().nth(1).unwrap();
    assert!(second.starts_with("0.0000000000000000e0,6.3661977236758"));
    assert!(second.ends_with(",exact-number,"));
}

#[test]
fn poisson_profile_is_positive() {
    let dir = tempfile::tempdir().unwrap();
    let out = wigner(dir.path(), &["profile", "--state", "poisson", "--N", "10.5", "--method", "exact", "--points", "300"]);
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    assert!(column(&csv, "W").iter().all(|w| w.unwrap() > 0.0));
}

#[test]
fn quadrature_profile_matches_spectral() {
    let dir = tempfile::tempdir().unwrap();
    let common = ["profile", "--state", "family", "--L", "3", "--N", "1.5", "--points", "25"];
    let q = wigner(dir.path(), &[&common[..], &["--method", "quadrature", "--M", "128", "--output", "q.csv"]].concat());
    let s = wigner(dir.path(), &[&common[..], &["--method", "spectral", "--output", "s.csv"]].concat());
    assert!(q.status.success() && s.status.success());
    let wq = column(&fs::read_to_string(dir.path().join("q.csv")).unwrap(), "W");
    let ws = column(&fs::read_to_string(dir.path().join("s.csv")).unwrap(), "W");
    for (a, b) in wq.iter().zip(&ws) {
        assert!((a.unwrap() - b.unwrap()).abs() <= 1e-6 * b.unwrap().abs().max(0.01));
    }
}

#[test]
fn saddle_on_family_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = wigner(dir.path(), &["profile", "--state", "family", "--N", "10.5", "--L", "4", "--method", "saddle"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("--state number --n 10"), "{msg}");
    let missing = wigner(dir.path(), &["profile", "--state", "number"]);
    assert_eq!(missing.status.code(), Some(2));
    let bad_flag = wigner(dir.path(), &["profile", "--points", "many"]);
    assert_eq!(bad_flag.status.code(), Some(2));
}

#[test]
fn saddle_profile_marks_regions() {
    let dir = tempfile::tempdir().unwrap();
    let r = 1.5f64.sqrt().to_string();
    let out = wigner(dir.path(), &["profile", "--n", "1", "--method", "saddle", "--points", "3", "--rmax", &format!("{}", 2.0 * 1.5f64.sqrt()), "--rmin", "0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "r,W,method,stderr,region");
    assert!(lines[1].ends_with(",,saddle,,origin"));
    assert!(lines[2].ends_with(",,saddle,,turning"), "{} vs r={r}", lines[2]);
    assert!(lines[3].ends_with(",saddle,,"));
    let wkb = wigner(dir.path(), &["profile", "--n", "1", "--method", "wkb", "--points", "5", "--rmin", "0.2", "--rmax", "2", "--output", "w.csv"]);
    assert!(wkb.status.success());
    let csv = fs::read_to_string(dir.path().join("w.csv")).unwrap();
    assert!(csv.lines().last().unwrap().ends_with(",exterior"));
}

#[test]
fn interpolation_is_labelled() {
    let dir = tempfile::tempdir().unwrap();
    let r = 1.5f64.sqrt();
    let (lo, hi) = ((r - 0.4).to_string(), (r + 0.4).to_string());
    let out = wigner(dir.path(), &["profile", "--n", "1", "--method", "saddle", "--points", "3", "--rmin", &lo, "--rmax", &hi, "--interpolate"]);
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    let line = csv.lines().nth(2).unwrap();
    assert!(line.ends_with("turning-interpolated"));
    assert!(!line.starts_with(",,"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# sweep\nstate = number\nn = 2\npoints = 7\nrmax = 3\n").unwrap();
    let cfg_s = cfg.to_str().unwrap();
    let out = wigner(dir.path(), &["--config", cfg_s, "profile", "--points", "9"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10);
    let r = column(&csv, "r");
    assert_eq!(r.last().unwrap().unwrap(), 3.0);
    fs::write(&cfg, "n = 2\npoitns = 3\n").unwrap();
    let bad = wigner(dir.path(), &["--config", cfg_s, "profile"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("poitns"));
    let missing = wigner(dir.path(), &["--config", "/nonexistent/x.cfg", "profile", "--n", "1"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn environment_sets_default_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_wigner"))
        .args(["profile", "--n", "0", "--points", "4"])
        .env("WIGNER_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("profile.csv").exists());
    assert!(dir.path().join("profile.csv.meta.json").exists());
}

#[test]
fn sidecar_reruns_to_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = wigner(dir.path(), &["profile", "--state", "family", "--N", "1.5", "--L", "2", "--method", "mc", "--samples", "20000", "--points", "6", "--workers", "1"]);
    assert!(out.status.success());
    let first = fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    let meta: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("profile.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["seed"], "42");
    assert_eq!(meta["config"]["samples"], "20000");
    assert!(meta["wall_time_s"].as_str().unwrap().parse::<f64>().unwrap() >= 0.0);
    assert_eq!(meta["cli_version"], env!("CARGO_PKG_VERSION"));
    assert!(column(&first, "stderr").iter().all(|s| s.unwrap() > 0.0));
    let argv: Vec<String> = meta["command_line"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
    let mut args: Vec<&str> = argv[1..].iter().map(String::as_str).collect();
    let pos = args.iter().position(|a| *a == "--workers").unwrap();
    args[pos + 1] = "3";
    let again = wigner(dir.path(), &args);
    assert!(again.status.success());
    assert_eq!(first, fs::read_to_string(dir.path().join("profile.csv")).unwrap());
}

#[test]
fn json_output_uses_strings() {
    let dir = tempfile::tempdir().unwrap();
    let out = wigner(dir.path(), &["profile", "--n", "1", "--points", "3", "--format", "json"]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("profile.json")).unwrap()).unwrap();
    let row = &doc["rows"][0];
    assert_eq!(row["r"], "0.0000000000000000e0");
    assert!(row["W"].as_str().unwrap().parse::<f64>().unwrap() < 0.0);
    assert!(row["stderr"].is_null());
}

#[test]
fn figure_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let out = wigner(dir.path(), &["figure2", "--points", "1200"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for n in [1, 10] {
        let manifest: Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join(format!("figure2_n{n}_manifest.json"))).unwrap()).unwrap();
        let files = manifest["files"].as_array().unwrap();
        assert_eq!(files.len(), 3);
        assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
        for f in files {
            assert!(dir.path().join(f.as_str().unwrap()).exists());
        }
    }
    let read = |name: &str| fs::read_to_string(dir.path().join(name)).unwrap();
    let r: Vec<f64> = column(&read("figure2_n10_exact.csv"), "r").into_iter().map(Option::unwrap).collect();
    let top = 10.5f64.sqrt() - 0.3;
    let exact = crossings(&r, &column(&read("figure2_n10_exact.csv"), "W"), 0.8, top);
    let saddle = crossings(&r, &column(&read("figure2_n10_saddle.csv"), "W"), 0.8, top);
    assert_eq!(exact.len(), saddle.len());
    for (a, b) in exact.iter().zip(&saddle) {
        assert!((a - b).abs() <= 0.05);
    }
    assert!(column(&read("figure2_n1_poisson.csv"), "W").iter().all(|w| w.unwrap() >= 0.0));
}

#[test]
fn check_suites_report_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = wigner(dir.path(), &["check", "determinant"]);
    assert_eq!(ok.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["reports"][0]["items"].as_array().unwrap().len(), 8);
    assert!(dir.path().join("check_determinant.json.meta.json").exists());

    let sign = wigner(dir.path(), &["check", "sign", "--L", "1..3", "--samples", "50000"]);
    assert_eq!(sign.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&sign.stdout).unwrap();
    let items = report["reports"][0]["items"].as_array().unwrap();
    assert_eq!(items.len(), 4);
    assert_eq!(items[0]["value"].as_str().unwrap().parse::<f64>().unwrap(), 1.0);

    let failing = wigner(dir.path(), &["check", "oracle", "--M", "8"]);
    assert_eq!(failing.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&failing.stdout).unwrap();
    assert_eq!(report["passed"], false);
}

#[test]
fn saddle_table_fields() {
    let dir = tempfile::tempdir().unwrap();
    let out = wigner(dir.path(), &["saddle-table", "--n", "1", "--L", "8", "--points", "5"]);
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("saddle_table.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("s,u,branch,theta_re,theta_im"));
    assert!(lines[3].contains(",turning,"));
    assert!(lines[5].contains(",exterior,"));
    let residuals = column(&csv, "residual");
    assert!(residuals.iter().flatten().all(|&r| r <= 1e-12 * 2.0 * 1.5f64.sqrt()));
    let inf = wigner(dir.path(), &["saddle-table", "--r", "2", "--L", "inf", "--points", "3", "--smax", "1", "--output", "i.csv"]);
    assert!(inf.status.success());
    let csv = fs::read_to_string(dir.path().join("i.csv")).unwrap();
    assert!((column(&csv, "theta_re")[0].unwrap() - PI / 2.0).abs() < 1e-15);
    let bad = wigner(dir.path(), &["saddle-table", "--L", "1"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn mc_diagnostics_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = wigner(dir.path(), &["mc-diag", "--L", "1..4", "--samples", "40000"]);
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("mc_diag.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    let phase = column(&csv, "mean_phase");
    assert_eq!(phase[0], Some(1.0));
    assert!(phase.iter().all(|p| p.unwrap() > 0.0));
}
