//! End-to-end runs of the `hardy-ss` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hardy-ss"));
    c.env_remove("HARDY_SS_OUTDIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn hardy-ss")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn dir_arg(d: &Path) -> String {
    d.to_str().unwrap().to_string()
}

/// Small grid so the PDE runs stay quick.
const SMALL_PDE: &[&str] = &["--cells", "128", "--snapshots", "6", "--t-end", "0.5"];

#[test]
fn solve_profile_writes_referenced_files() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("p");
    let o = run(&["solve-profile", "--out-dir", &dir_arg(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((summary["k_star"].as_f64().unwrap() - 0.83754).abs() < 1e-4);
    let manifest = read_json(&out.join("manifest.json"));
    let files = manifest["files"].as_array().unwrap();
    let names: Vec<&str> = files.iter().map(|f| f["path"].as_str().unwrap()).collect();
    for want in ["profile.csv", "profile.json", "result.json", "plot_profile.py"] {
        assert!(names.contains(&want), "{want} missing from manifest");
    }
    for n in names {
        assert!(out.join(n).is_file(), "{n} not written");
    }
    assert_eq!(manifest["settings"]["N"], 3);
    let profile = read_json(&out.join("profile.json"));
    assert!(profile["K_const"].is_number() && profile["xi0"]["finite"].is_number());
}

#[test]
fn json_only_skips_csv_and_scripts() {
    let tmp = TempDir::new().unwrap();
    let o = run(&["solve-profile", "--json-only", "--out-dir", &dir_arg(tmp.path())]);
    assert_eq!(o.status.code(), Some(0));
    let mut names: Vec<String> =
        fs::read_dir(tmp.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names, ["manifest.json", "profile.json", "result.json"]);
}

#[test]
fn runs_are_deterministic() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        let o = run(&["solve-profile", "--m", "3", "--p", "2", "--N", "4", "--out-dir", &dir_arg(d)]);
        assert_eq!(o.status.code(), Some(0));
    }
    for f in ["profile.csv", "profile.json", "result.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn output_dir_precedence() {
    let tmp = TempDir::new().unwrap();
    let env_dir = tmp.path().join("env");
    let flag_dir = tmp.path().join("flag");
    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, format!("out_dir = \"{}\"\nm = 3\np = 2\nN = 4\n", tmp.path().join("cfg").display())).unwrap();
    let cfg = dir_arg(&cfg);

    let o = bin().args(["solve-profile", "--json-only", "--config", &cfg]).env("HARDY_SS_OUTDIR", &env_dir).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(env_dir.join("manifest.json").is_file());
    assert_eq!(read_json(&env_dir.join("manifest.json"))["settings"]["m"], 3.0);

    let o = bin()
        .args(["solve-profile", "--json-only", "--config", &cfg, "--out-dir", &dir_arg(&flag_dir)])
        .env("HARDY_SS_OUTDIR", &env_dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(flag_dir.join("manifest.json").is_file());

    let o = run(&["solve-profile", "--json-only", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    assert!(tmp.path().join("cfg").join("manifest.json").is_file());
}

#[test]
fn usage_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    let d = dir_arg(tmp.path());
    assert_eq!(run(&["solve-profile", "--m", "1", "--out-dir", &d]).status.code(), Some(2));
    assert_eq!(run(&["solve-profile", "--m", "2", "--p", "3", "--out-dir", &d]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["phase-portrait", "--seed", "1,2", "--out-dir", &d]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--out-dir", &d]).status.code(), Some(2));
    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "mm = 2\n").unwrap();
    assert_eq!(run(&["solve-profile", "--config", &dir_arg(&bad), "--out-dir", &d]).status.code(), Some(2));
    let file = tmp.path().join("plain");
    fs::write(&file, "").unwrap();
    let o = run(&["solve-profile", "--out-dir", &dir_arg(&file.join("x"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3() {
    let tmp = TempDir::new().unwrap();
    // the bump reaches the outer boundary almost at once
    let o = run(&["evolve-pde", "--r-max", "1.2", "--cells", "64", "--json-only", "--out-dir", &dir_arg(tmp.path())]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_list_prints_catalog() {
    let o = run(&["verify", "--list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    for id in ["critical-spectra", "profile-file", "pde-ordering", "pde-supersolution"] {
        assert!(text.contains(id), "{id} not listed");
    }
}

#[test]
fn verify_from_detects_corruption() {
    let tmp = TempDir::new().unwrap();
    let prof = tmp.path().join("p");
    assert_eq!(run(&["solve-profile", "--out-dir", &dir_arg(&prof)]).status.code(), Some(0));
    let report = tmp.path().join("v");
    let o = run(&["verify", "--from", &dir_arg(&prof), "--out-dir", &dir_arg(&report)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(read_json(&report.join("verify.json"))["passed"], true);

    // a positive local minimum breaks the profile invariants
    let path = prof.join("profile.json");
    let mut doc = read_json(&path);
    let f = doc["grid"]["f"].as_array_mut().unwrap();
    let v = f[10].as_f64().unwrap();
    f[11] = Value::from(v * 2.0);
    fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let o = run(&["verify", "--from", &dir_arg(&prof), "--out-dir", &dir_arg(&report)]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(read_json(&report.join("verify.json"))["passed"], false);

    fs::write(&path, "{ not json").unwrap();
    let o = run(&["verify", "--from", &dir_arg(&prof), "--out-dir", &dir_arg(&report)]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["evolve-pde", "--profile", &dir_arg(&path), "--out-dir", &dir_arg(&report)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_fresh_passes() {
    let tmp = TempDir::new().unwrap();
    let mut args = vec!["verify", "--fresh", "--out-dir"];
    let d = dir_arg(tmp.path());
    args.push(&d);
    args.extend_from_slice(SMALL_PDE);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn evolve_pde_writes_snapshots_and_manifest() {
    let tmp = TempDir::new().unwrap();
    let d = dir_arg(tmp.path());
    let mut args = vec!["evolve-pde", "--eps", "0.2,0.05,0.1", "--track-self-similarity", "--out-dir", &d];
    args.extend_from_slice(SMALL_PDE);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read_json(&tmp.path().join("evolution.json"));
    assert_eq!(doc["eps"], serde_json::json!([0.05, 0.1, 0.2]));
    assert_eq!(doc["grid"]["n"], 128);
    assert_eq!(doc["grid"]["R_max"], 8.0);
    assert_eq!(doc["times"].as_array().unwrap().len(), 7);
    assert_eq!(doc["checks"]["ordering_violations"], 0);
    assert!(doc["checks"]["tracking"]["max_deviation"].is_number());
    for eps in ["0.05", "0.1", "0.2"] {
        let f = tmp.path().join(format!("snapshots_eps_{eps}.csv"));
        let text = fs::read_to_string(&f).unwrap();
        assert!(text.starts_with("t,r,u\n"));
        assert_eq!(text.lines().count(), 1 + 7 * 128);
    }
    let manifest = read_json(&tmp.path().join("manifest.json"));
    assert_eq!(manifest["command"], "evolve-pde");
}

#[test]
fn evolve_pde_with_hardy_constant() {
    let tmp = TempDir::new().unwrap();
    let d = dir_arg(tmp.path());
    let mut args = vec!["evolve-pde", "--k-hardy", "4", "--json-only", "--out-dir", &d];
    args.extend_from_slice(SMALL_PDE);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read_json(&tmp.path().join("evolution.json"));
    assert_eq!(doc["lambda"], 4.0);
    // snapshot times are reported in the original time variable
    let times = doc["times"].as_array().unwrap();
    assert!((times.last().unwrap().as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(doc["params"]["k_hardy"], 4.0);
}

#[test]
fn phase_portrait_classifies_seeds() {
    let tmp = TempDir::new().unwrap();
    let d = dir_arg(tmp.path());
    let o = run(&["phase-portrait", "--seed", "0,-0.5,0", "--seed", "0.5,-0.2,0.3", "--from-profile", "--out-dir", &d]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let orbits = read_json(&tmp.path().join("orbits.json"));
    let a = orbits.as_array().unwrap();
    assert_eq!(a.len(), 3);
    assert_eq!(a[0]["fixed_point"], true);
    assert_eq!(a[2]["x_monotone"], true);
    assert!(a[2]["start"].as_array().unwrap().iter().all(Value::is_number));
    let csv = fs::read_to_string(tmp.path().join("orbits.csv")).unwrap();
    assert!(csv.starts_with("orbit,eta,X,Y,Z\n"));
}

#[test]
fn sweep_runs_each_triple_in_its_own_directory() {
    let tmp = TempDir::new().unwrap();
    let d = dir_arg(tmp.path());
    let o = run(&["sweep", "--triple", "2,1,3", "--triple", "3,2,4", "--jobs", "2", "--out-dir", &d]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for sub in ["m2_p1_N3", "m3_p2_N4"] {
        assert!(tmp.path().join(sub).join("profile.json").is_file());
    }
    let summary = read_json(&tmp.path().join("summary.json"));
    assert_eq!(summary.as_array().unwrap().len(), 2);
    assert!(tmp.path().join("summary.csv").is_file());
}
