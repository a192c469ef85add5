//! End-to-end runs of the command-line binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gibbs_coupling::group::{build_dihedral, save_group};
use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gibbs-coupling"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, json).unwrap();
    p.to_string_lossy().into_owned()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn gap_on_eight_cycle_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "gap.json",
        r#"{"experiment": "gap", "group": {"family": "cyclic", "n": 8, "gens": [1, -1]}}"#,
    );
    let out = dir.path().join("run");
    let o = bin(&["gap", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,replica,statistic_name,value"));
    let gap: f64 = csv
        .lines()
        .find(|l| l.contains(",base.gap,"))
        .and_then(|l| l.rsplit(',').next())
        .unwrap()
        .parse()
        .unwrap();
    let want = 0.25 * (1.0 - (std::f64::consts::TAU / 8.0).cos());
    assert!((gap - want).abs() < 1e-10);
    assert_eq!(csv.lines().filter(|l| l.contains("base.eigenvalue.")).count(), 8);

    for f in ["kernel_base.csv", "kernel_edge.csv", "kernel_comparison.csv", "summary.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let m = read_json(&out.join("manifest.json"));
    assert_eq!(m["status"], "complete");
    assert_eq!(m["experiment"], "gap");
    assert_eq!(m["assertions_passed"], true);
    assert!(m["wall_clock_seconds"].as_f64().is_some());
}

#[test]
fn jsonl_records_carry_the_csv_fields() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = bin(&["identity-matrix", "--n", "10", "--replicas", "10000", "--format", "jsonl", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(out.join("results.jsonl")).unwrap();
    let rec: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(rec["statistic_name"], "max_identity_residual");
    assert!(rec["value"].as_f64().unwrap() <= 1e-10);
    assert!(rec.get("t").is_some() && rec.get("replica").is_some());
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let out = out.to_str().unwrap();
    let cases = [
        ("unknown_field.json", r#"{"experiment": "gap", "group": {"family": "complete", "n": 5}, "colour": 1}"#, "gap"),
        ("unknown_threshold.json", r#"{"experiment": "connect", "n": 8, "thresholds": {"zeta": 1}}"#, "connect"),
        ("zero_replicas.json", r#"{"experiment": "connect", "n": 8, "replicas": 0}"#, "connect"),
        ("missing_file.json", r#"{"experiment": "gap", "group": {"family": "file", "path": "/nonexistent/g.txt"}}"#, "gap"),
        ("wrong_command.json", r#"{"experiment": "gap", "group": {"family": "complete", "n": 5}}"#, "compare"),
        ("not_json.json", "experiment = gap", "gap"),
    ];
    for (name, json, cmd) in cases {
        let cfg = write_config(dir.path(), name, json);
        let o = bin(&[cmd, "--config", &cfg, "--out", out]);
        assert_eq!(o.status.code(), Some(1), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = bin(&["oracle", "--suite", "nope", "--out", out]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn short_phase_two_is_data_not_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"experiment": "couple-simplex", "group": {"family": "complete", "n": 16},
            "T1": 500, "T2": 2, "replicas": 50, "seed": 3}"#,
    );
    let out = dir.path().join("run");
    let o = bin(&["couple-simplex", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = read_json(&out.join("summary.json"));
    assert_eq!(s["summary"]["not_connected"], 50);
    assert_eq!(s["summary"]["coupling_frequency"], 0.0);
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| l.contains("NotConnected")).count(), 50);
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "m.json",
        r#"{"experiment": "couple-matrix", "n": 12, "replicas": 40, "seed": 11}"#,
    );
    let run = |name: &str, extra: &[&str]| {
        let out = dir.path().join(name);
        let mut args = vec!["couple-matrix", "--config", &cfg, "--out", out.to_str().unwrap()];
        args.extend_from_slice(extra);
        assert_eq!(bin(&args).status.code(), Some(0));
        fs::read(out.join("results.csv")).unwrap()
    };
    let a = run("a", &[]);
    let b = run("b", &[]);
    let c = run("c", &["--seed", "12"]);
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "k.json", r#"{"experiment": "connect", "n": 16, "replicas": 5, "seed": 1}"#);
    let out = dir.path().join("run");
    let o = bin(&["connect", "--config", &cfg, "--seed", "99", "--replicas", "7", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let m = read_json(&out.join("manifest.json"));
    assert_eq!(m["seed"], 99);
    assert_eq!(m["config"]["replicas"], 7);
    assert_eq!(m["derived_seeds"].as_array().unwrap().len(), 7);
}

#[test]
fn group_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("d3.txt");
    save_group(&build_dihedral(3).unwrap(), &g).unwrap();
    let cfg = write_config(
        dir.path(),
        "f.json",
        &format!(r#"{{"experiment": "compare", "group": {{"family": "file", "path": {:?}}}, "replicas": 200}}"#, g),
    );
    let out = dir.path().join("run");
    let o = bin(&["compare", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn oracle_prints_twelve_digits() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = bin(&["oracle", "--suite", "kernel-enumeration", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert_eq!(
        stdout.lines().next().unwrap(),
        "row 0: [5.00000000000e-1, 2.50000000000e-1, 0.00000000000e0, 2.50000000000e-1]"
    );
    let o = bin(&["oracle", "--suite", "schedule-enumeration", "--n", "3", "--out", out.to_str().unwrap()]);
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert_eq!(stdout.trim(), "P[tau <= 4] (n=3) = 9.62962962963e-1");
}
