use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_shocklab"));
    c.env("RUST_LOG", "warn");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn shocklab")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Simulates a small panel and returns its directory.
fn simulate(dir: &Path, extra: &str) -> PathBuf {
    let spec = dir.join("spec.cfg");
    fs::write(&spec, format!("days = 40\nsymbols = 20\nseed = 11\n{extra}")).unwrap();
    let out = dir.join("sim");
    let o = run(&["simulate", "--spec", p(&spec), "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn json(path: &Path) -> Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count() - 1
}

#[test]
fn simulated_shocks_are_all_found() {
    let dir = tempfile::tempdir().unwrap();
    let sim = simulate(dir.path(), "");
    let out = dir.path().join("out");
    let o = run(&["run", "--input", p(&sim.join("panel.csv")), "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let truth = json(&sim.join("truth.json"));
    let truth = truth.as_array().unwrap();
    let shocks: Vec<Value> = fs::read_to_string(out.join("shocks.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(shocks.len(), truth.len());
    for (s, t) in shocks.iter().zip(truth) {
        assert_eq!(s["date"], t["date"]);
        assert_eq!(s["accepted"], true);
        let d = s["t_c"].as_i64().unwrap() - t["t_c"].as_i64().unwrap();
        assert!(d.abs() <= 2, "{} off by {d}", s["date"]);
    }

    let m = json(&out.join("manifest.json"));
    assert_eq!(m["counts"]["detect"]["accepted"], 40);
    assert_eq!(m["counts"]["fit"]["market_rows"], 40);
    assert_eq!(csv_rows(&out.join("shock_laws.csv")), 40);
    assert_eq!(csv_rows(&out.join("plots/fig12_bath_market.csv")), 40);
    assert_eq!(csv_rows(&out.join("plots/fig06_response_curves.csv")), 40 * 2 * 90);
    assert_eq!(csv_rows(&out.join("plots/fig05_score_pdf.csv")), 5 * 20);
    for (name, digest) in m["outputs"].as_object().unwrap() {
        let bytes = fs::read(out.join(name)).unwrap();
        assert_eq!(digest.as_str().unwrap(), shocklab::pipeline::sha256_hex(&bytes), "{name}");
    }
    let header = fs::read_to_string(out.join("shock_laws.csv")).unwrap();
    assert!(header.starts_with("date,M,omega_b,omega_a,alpha_b,alpha_a,P_b,P_a,V1,V2b,V2a,r_b,r_a\n"));
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let sim = simulate(dir.path(), "");
    let input = sim.join("panel.csv");
    let mut manifests = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(format!("out{threads}"));
        let o = run(&["--threads", threads, "run", "--input", p(&input), "--out", p(&out)]);
        assert!(o.status.success());
        manifests.push(fs::read(out.join("manifest.json")).unwrap());
    }
    assert_eq!(manifests[0], manifests[1]);
}

#[test]
fn no_shocks_is_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let sim = simulate(dir.path(), "");
    let out = dir.path().join("out");
    let o = run(&["run", "--input", p(&sim.join("panel.csv")), "--out", p(&out), "--xc", "1e9"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = json(&out.join("manifest.json"));
    assert_eq!(m["counts"]["detect"]["accepted"], 0);
    assert_eq!(m["counts"]["detect"]["rejected_no_cascade"], 40);
    assert_eq!(csv_rows(&out.join("shock_laws.csv")), 0);
    let warnings = m["warnings"].as_array().unwrap();
    assert!(warnings.iter().any(|w| w.as_str().unwrap().contains("no accepted main shocks")));
}

#[test]
fn table1_skipped_without_matching_dates() {
    let dir = tempfile::tempdir().unwrap();
    let sim = simulate(dir.path(), "start_date = 2010-03-01\n");
    let out = dir.path().join("out");
    let o = run(&["run", "--input", p(&sim.join("panel.csv")), "--out", p(&out)]);
    assert!(o.status.success());
    assert!(!out.join("table1.csv").exists());
    let m = json(&out.join("manifest.json"));
    assert!(m["warnings"]
        .as_array()
        .unwrap()
        .iter()
        .any(|w| w.as_str().unwrap().contains("table1 comparison skipped")));
}

#[test]
fn stage_subcommands_stop_early() {
    let dir = tempfile::tempdir().unwrap();
    let sim = simulate(dir.path(), "");
    let out = dir.path().join("out");
    let o = run(&["detect", "--input", p(&sim.join("panel.csv")), "--out", p(&out)]);
    assert!(o.status.success());
    assert!(out.join("shocks.jsonl").exists());
    assert!(!out.join("shock_laws.csv").exists());
    assert_eq!(json(&out.join("manifest.json"))["stages"], serde_json::json!(["ingest", "detect"]));
}

#[test]
fn bad_input_exits_1_with_marker() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("panel.csv");
    fs::write(&input, "date,minute,symbol,price\n2001-01-02,0,AAA,10\n2001-01-02,0,AAA,11\n").unwrap();
    let out = dir.path().join("out");
    let o = run(&["run", "--input", p(&input), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(1));
    let marker = fs::read_to_string(out.join("FAILED")).unwrap();
    assert!(marker.contains("stage ingest"), "{marker}");
    assert!(marker.contains("line 3"), "{marker}");

    let o = run(&["run", "--input", p(&dir.path().join("missing.csv")), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn too_few_days_fail_in_detect() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.cfg");
    fs::write(&spec, "days = 5\nsymbols = 10\n").unwrap();
    let sim = dir.path().join("sim");
    assert!(run(&["simulate", "--spec", p(&spec), "--out", p(&sim)]).status.success());
    let out = dir.path().join("out");
    let o = run(&["run", "--input", p(&sim.join("panel.csv")), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(1));
    let marker = fs::read_to_string(out.join("FAILED")).unwrap();
    assert!(marker.starts_with("stage detect"), "{marker}");
    assert!(out.join("ingest_report.json").exists());
}

#[test]
fn bad_config_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    fs::write(&cfg, "q = 3\nsmoothing = 4\n").unwrap();
    let o = run(&["run", "--config", p(&cfg), "--input", "x.csv", "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("smoothing"));
    let o = run(&["run", "--input", "x.csv", "--out", p(dir.path()), "--step", "3"]);
    assert_eq!(o.status.code(), Some(1));
}
