//! End-to-end runs of the `mslab` binary: exit codes, artifacts, manifests.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn mslab(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mslab"));
    cmd.args(args).env_remove("MSLAB_OUT");
    cmd
}

fn run(args: &[&str]) -> Output {
    mslab(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_slice(&fs::read(dir.join("manifest.json")).unwrap()).unwrap()
}

fn listing(dir: &Path) -> BTreeSet<String> {
    fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect()
}

const SMALL_RING: &[&str] = &["--set", "ring2d.n_theta=64", "--set", "ring2d.n_t=64"];

fn with<'a>(base: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
    base.iter().chain(extra).copied().collect()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    assert_eq!(code(&run(&["ring2d", "--help"])), 0);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["bogus"])), 1);
    assert_eq!(code(&run(&["catenoid", "--frobnicate"])), 1);
}

#[test]
fn bad_configs_exit_one() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().to_str().unwrap();
    for set in ["catenoid.bogus=1", "tolerances.margin=-1", "ring2d.inner=/no/such/file.csv", "noequals"] {
        let o = run(&["catenoid", "--out", out, "--set", set]);
        assert_eq!(code(&o), 1, "{set}: {}", stderr(&o));
        assert!(stderr(&o).contains("error"));
    }
    let o = run(&["catenoid", "--out", out, "--config", "/no/such/config.toml"]);
    assert_eq!(code(&o), 1);

    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "[catenoid\nn = 3\n").unwrap();
    assert_eq!(code(&run(&["catenoid", "--out", out, "--config", cfg.to_str().unwrap()])), 1);
}

#[test]
fn degenerate_inputs_exit_one() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().to_str().unwrap();
    assert_eq!(code(&run(&["catenoid", "--out", out, "--set", "catenoid.r_max=1"])), 1);
    assert_eq!(code(&run(&["convergence", "--out", out, "--set", "convergence.doublings=0"])), 1);
    let o = run(&with(&["ring2d", "--out", out, "--set", "ring2d.t_order=3"], SMALL_RING));
    assert_eq!(code(&o), 1);
    // Inner circle sticking out of the outer one.
    let o = run(&with(&["ring2d", "--out", out, "--set", "ring2d.inner=circle 0.9 0 0.3"], SMALL_RING));
    assert_eq!(code(&o), 1, "{}", stderr(&o));
}

#[test]
fn non_convex_boundary_is_reported() {
    let tmp = TempDir::new().unwrap();
    let csv = tmp.path().join("inner.csv");
    let mut text = String::from("theta,h\n");
    for k in 0..64 {
        let t = std::f64::consts::TAU * k as f64 / 64.0;
        text.push_str(&format!("{t},{}\n", 0.3 + 0.2 * (4.0 * t).cos()));
    }
    fs::write(&csv, text).unwrap();
    let inner = format!("ring2d.inner={}", csv.display());
    let out = tmp.path().join("out");
    let o = run(&with(&["ring2d", "--out", out.to_str().unwrap(), "--set", &inner], SMALL_RING));
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("NonConvexSlice"), "{}", stderr(&o));
}

#[test]
fn failing_check_exits_two_with_a_consistent_manifest() {
    let tmp = TempDir::new().unwrap();
    // A margin bound far below zero cannot fail, a ridiculous closed-form
    // tolerance can.
    let o = run(&["catenoid", "--out", tmp.path().to_str().unwrap(), "--set", "tolerances.closed_form=1e-30"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let m = manifest(&tmp.path().join("catenoid"));
    assert_eq!(m["pass"], Value::Bool(false));
    let failed: Vec<&str> = m["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == Value::Bool(false))
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["closed_forms"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("[FAIL] closed_forms"));
}

fn assert_manifest_complete(dir: &Path, exit: i32) {
    let m = manifest(dir);
    let listed: BTreeSet<String> =
        m["artifacts"].as_array().unwrap().iter().map(|a| a.as_str().unwrap().to_string()).collect();
    assert_eq!(listed, listing(dir), "artifacts of {}", dir.display());
    let all_pass = m["checks"].as_array().unwrap().iter().all(|c| c["pass"] == Value::Bool(true));
    assert_eq!(m["pass"], Value::Bool(all_pass));
    assert_eq!(exit, if all_pass { 0 } else { 2 });
    assert!(m["config"].is_object());
    assert!(m["seed"].is_u64());
    assert!(m["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
    assert!(m["config"].get("output_dir").is_none());
}

#[test]
fn every_command_writes_a_complete_manifest() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().to_str().unwrap();
    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("catenoid", vec!["--set", "catenoid.r_max=20"]),
        ("radial", vec![]),
        ("ring2d", SMALL_RING.to_vec()),
        ("convergence", vec!["--set", "convergence.doublings=2"]),
        ("lemma32", vec!["--set", "lemma32.instances=200"]),
    ];
    for (cmd, extra) in runs {
        let mut args = vec![cmd, "--out", out];
        args.extend(extra);
        let o = run(&args);
        let c = code(&o);
        assert!(c == 0 || c == 2, "{cmd}: {}", stderr(&o));
        assert_eq!(c, 0, "{cmd}: {}", String::from_utf8_lossy(&o.stdout));
        assert_manifest_complete(&tmp.path().join(cmd), c);
    }
}

#[test]
fn n4_catenoid_fails_its_asymptotic_check() {
    let tmp = TempDir::new().unwrap();
    let o = run(&["catenoid", "--out", tmp.path().to_str().unwrap(), "--set", "catenoid.n=4"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stdout).contains("[FAIL] asymptotics"));
    assert_manifest_complete(&tmp.path().join("catenoid"), 2);
}

fn strip_clock(mut m: Value) -> Value {
    m.as_object_mut().unwrap().remove("wall_clock_seconds");
    m
}

fn assert_same_outputs(a: &Path, b: &Path) {
    let files = listing(a);
    assert_eq!(files, listing(b));
    for f in &files {
        if f == "manifest.json" {
            assert_eq!(strip_clock(manifest(a)), strip_clock(manifest(b)));
        } else {
            assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
        }
    }
}

#[test]
fn reruns_are_byte_identical() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for (cmd, extra) in [
        ("ring2d", SMALL_RING),
        ("lemma32", &["--set", "lemma32.instances=300"][..]),
        ("catenoid", &["--set", "catenoid.r_max=10"][..]),
    ] {
        for dir in [&a, &b] {
            let mut args = vec![cmd, "--out", dir.path().to_str().unwrap()];
            args.extend(extra);
            assert_eq!(code(&run(&args)), 0);
        }
        assert_same_outputs(&a.path().join(cmd), &b.path().join(cmd));
    }
}

#[test]
fn seed_changes_the_lemma_sample() {
    let tmp = TempDir::new().unwrap();
    let mut csvs = Vec::new();
    for seed in ["seed=1", "seed=2"] {
        let out = tmp.path().join(seed);
        let args = ["lemma32", "--out", out.to_str().unwrap(), "--set", "lemma32.instances=50", "--set", seed];
        assert_eq!(code(&run(&args)), 0);
        csvs.push(fs::read(out.join("lemma32/lemma32.csv")).unwrap());
    }
    assert_ne!(csvs[0], csvs[1]);
}

#[test]
fn output_root_precedence() {
    let tmp = TempDir::new().unwrap();
    let env_root = tmp.path().join("env");
    let cfg_root = tmp.path().join("cfg");
    let cli_root = tmp.path().join("cli");
    let args = ["lemma32", "--set", "lemma32.instances=20"];

    let o = mslab(&args).env("MSLAB_OUT", &env_root).output().unwrap();
    assert_eq!(code(&o), 0);
    assert!(env_root.join("lemma32/manifest.json").exists());

    let cfg = tmp.path().join("c.toml");
    fs::write(&cfg, format!("output_dir = {:?}\n", cfg_root.to_str().unwrap())).unwrap();
    let mut a = args.to_vec();
    a.extend(["--config", cfg.to_str().unwrap()]);
    let o = mslab(&a).env("MSLAB_OUT", &env_root).output().unwrap();
    assert_eq!(code(&o), 0);
    assert!(cfg_root.join("lemma32/manifest.json").exists());

    a.extend(["--out", cli_root.to_str().unwrap()]);
    assert_eq!(code(&mslab(&a).output().unwrap()), 0);
    assert!(cli_root.join("lemma32/manifest.json").exists());
}

#[test]
fn csv_floats_round_trip() {
    let tmp = TempDir::new().unwrap();
    let o = run(&with(&["ring2d", "--out", tmp.path().to_str().unwrap()], SMALL_RING));
    assert_eq!(code(&o), 0);
    let mut reader = csv::Reader::from_path(tmp.path().join("ring2d/profile.csv")).unwrap();
    let headers = reader.headers().unwrap().clone();
    assert!(headers.iter().any(|h| h == "f"));
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 65);
    for row in &rows {
        for field in row.iter() {
            field.parse::<f64>().unwrap_or_else(|_| panic!("{field:?} is not a number"));
        }
    }
}
