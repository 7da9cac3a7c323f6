use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use swlw::output::HEADER;
use swlw::snapshot;

fn swlw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swlw"))
        .args(args)
        .env("SWLW_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.ini");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const SMALL: &str = "[grid]\nn = 16\n\n[time]\ndt = 2e-3\nt_end = 0.01\n\n[scenario]\nname = smooth-random\nseed = 3\n\n[output]\nsnapshot_interval = 2\n";

#[test]
fn simulate_writes_csv_and_snapshots() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let out = tmp.path().join("out");
    let o = swlw(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let mut reader = csv::Reader::from_path(out.join("diagnostics.csv")).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, HEADER);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 6);
    assert_eq!(&rows[5][0], "5");

    for step in [0, 2, 4] {
        let (h, s) = snapshot::read_file(&out.join(format!("snapshot_{step:06}.bin"))).unwrap();
        assert_eq!(h.step, step);
        assert_eq!(h.n, 16);
        assert!(s.rho.values.iter().all(|r| *r > 0.0));
    }
    let (h, last) = snapshot::read_file(&out.join("final.bin")).unwrap();
    assert_eq!(h.step, 5);
    assert!((last.t - 0.01).abs() < 1e-15);
    // The last row describes the final state.
    let t: f64 = rows[5][1].parse().unwrap();
    assert_eq!(t, last.t);
    assert!(out.join("config.ini").exists());
}

#[test]
fn runs_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        let o = swlw(&["simulate", "--config", &cfg, "--out", dir.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    for name in ["diagnostics.csv", "final.bin", "snapshot_000004.bin"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn config_errors_exit_2_and_name_every_key() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[grid]\nn = 15\n[time]\ndt = -1\nbogus = 3\n[fluid]\ngamma = x\n[nowhere]\nk = 1\n",
    );
    let o = swlw(&["simulate", "--config", &cfg, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    for key in ["grid.n", "time.dt", "time.bogus", "fluid.gamma", "nowhere"] {
        assert!(err.contains(key), "{key} missing from {err}");
    }
}

#[test]
fn missing_config_file_is_a_config_error() {
    let o = swlw(&["simulate", "--config", "/nonexistent/run.ini"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn small_beta_warns() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &format!("{SMALL}\n[fluid]\nbeta = 1.2\n"));
    let o = swlw(&["simulate", "--config", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("β ≤ 4/3: no-vacuum guarantee void"));
}

#[test]
fn cfl_violation_exits_4_with_failure_snapshot() {
    let tmp = tempfile::tempdir().unwrap();
    let text = SMALL.replace("dt = 2e-3", "dt = 0.5").replace("t_end = 0.01", "t_end = 1.0");
    let cfg = write_config(tmp.path(), &text);
    let out = tmp.path().join("out");
    let o = swlw(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
    let (_, s) = snapshot::read_file(&out.join("failure.bin")).unwrap();
    assert_eq!(s.t, 0.0);
}

#[test]
fn perturbed_pair_writes_both_members() {
    let tmp = tempfile::tempdir().unwrap();
    let text = SMALL.replace("smooth-random", "perturbed-pair");
    let text = text.replace("seed = 3\n", "seed = 3\ndelta = 1e-3\n");
    let cfg = write_config(tmp.path(), &text);
    let out = tmp.path().join("out");
    let o = swlw(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (_, a) = snapshot::read_file(&out.join("final.bin")).unwrap();
    let (_, b) = snapshot::read_file(&out.join("partner/final.bin")).unwrap();
    assert_ne!(a.rho.values, b.rho.values);
}

#[test]
fn verify_reports_json() {
    let o = swlw(&["verify", "--suite", "decoupling"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["suite"], "decoupling");
    assert_eq!(v["passed"], true);
    assert!(v["checks"].as_array().unwrap().len() >= 2);
}

#[test]
fn unknown_suite_exits_2() {
    let o = swlw(&["verify", "--suite", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mms_prints_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[grid]\nn = 16\n[time]\ndt = 4e-3\nt_end = 0.02\n[scenario]\nname = smooth-random\n",
    );
    let o = swlw(&["mms", "--config", &cfg, "--levels", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let studies = v.as_array().unwrap();
    assert_eq!(studies.len(), 4);
    for s in studies {
        assert_eq!(s["levels"].as_array().unwrap().len(), 3);
    }
    let o = swlw(&["mms", "--config", &cfg, "--levels", "1"]);
    assert_eq!(o.status.code(), Some(2));
}
