use std::path::{Path, PathBuf};
use std::process::Command;

use dibmap::distributions::{multinomial_sample, sample_simplex};
use dibmap::mapper::{DibObjective, Objective};
use dibmap::JointPMF;
use dibmap_cli::FrontierDocument;
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dibmap"))
}

fn write_pmf(dir: &Path, name: &str, j: &JointPMF) -> PathBuf {
    let p = dir.join(name);
    j.write_csv(std::fs::File::create(&p).unwrap()).unwrap();
    p
}

fn run_ok(args: &[&str]) {
    let mut full = vec!["dibmap"];
    full.extend_from_slice(args);
    assert_eq!(dibmap_cli::run(full), 0, "{args:?}");
}

fn read_doc(p: &Path) -> FrontierDocument {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn diag2_map_has_points_at_zero_and_one_bit() {
    let dir = TempDir::new().unwrap();
    let pmf = dir.path().join("diag2.csv");
    std::fs::write(&pmf, "0.5,0\n0,0.5\n").unwrap();
    let out = dir.path().join("run.json");
    run_ok(&["map", "--pmf", pmf.to_str().unwrap(), "--epsilon", "0", "--seed", "1", "--out", out.to_str().unwrap()]);
    let doc = read_doc(&out);
    let hs: Vec<f64> = doc.points.iter().map(|p| p.h).collect();
    assert_eq!(hs, vec![0.0, 1.0]);
    assert!(doc.points.iter().all(|p| p.dmc && p.hull));
    assert_eq!(doc.meta["command"], "map");
    assert!(doc.meta["stats"].get("elapsed").is_none());
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "0.5,0.7\n").unwrap();
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code().unwrap();
    assert_eq!(code(&["map", "--pmf", bad.to_str().unwrap()]), 1);
    assert_eq!(code(&["map", "--pmf", "/nonexistent/file.csv"]), 1);
    assert_eq!(code(&["map", "--pmf", bad.to_str().unwrap(), "--epsilon=-0.5"]), 2);
    assert_eq!(code(&["map", "--pmf", bad.to_str().unwrap(), "--epsilon", "lots"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["map"]), 2);
    assert_eq!(code(&["symmetric-map", "--group", "klein"]), 2);
    assert_eq!(code(&["scaling", "--n", "10", "--trials", "3"]), 2);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn emitted_encoders_reproduce_their_coordinates() {
    let dir = TempDir::new().unwrap();
    let j = sample_simplex(9, 5, 12).unwrap();
    let pmf = write_pmf(dir.path(), "j.csv", &j);
    let out = dir.path().join("run.json");
    run_ok(&["map", "--pmf", pmf.to_str().unwrap(), "--epsilon", "0.02", "--seed", "4", "--out", out.to_str().unwrap()]);
    let doc = read_doc(&out);
    let mut obj = DibObjective::new(&j);
    for w in doc.points.windows(2) {
        assert!(w[0].h < w[1].h && w[0].i < w[1].i);
    }
    for p in &doc.points {
        let (x, y) = obj.evaluate(p.encoder.as_ref().unwrap());
        assert!((-x - p.h).abs() < 1e-9 && (y - p.i).abs() < 1e-9);
    }
}

#[test]
fn identical_command_lines_give_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let pmf = write_pmf(dir.path(), "j.csv", &sample_simplex(8, 4, 3).unwrap());
    let counts = dir.path().join("c.csv");
    multinomial_sample(&sample_simplex(8, 4, 3).unwrap(), 500, 1)
        .unwrap()
        .write_csv(std::fs::File::create(&counts).unwrap())
        .unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["map", "--pmf", pmf.to_str().unwrap(), "--epsilon", "0.05", "--seed", "9"],
        vec!["robust-map", "--counts", counts.to_str().unwrap(), "--epsilon", "0.01", "--seed", "2", "--bootstrap-reps", "20"],
        vec!["oracle", "--pmf", pmf.to_str().unwrap()],
        vec!["scaling", "--dib", "mapper:0", "--n", "5,6", "--trials", "2", "--ny", "4"],
    ];
    for args in cases {
        let a = bin().args(&args).output().unwrap();
        let b = bin().args(&args).output().unwrap();
        assert!(a.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn oracle_scores_a_candidate() {
    let dir = TempDir::new().unwrap();
    let pmf = write_pmf(dir.path(), "random8x5.csv", &sample_simplex(8, 5, 8).unwrap());
    let run = dir.path().join("run.json");
    let scored = dir.path().join("score.json");
    run_ok(&["map", "--pmf", pmf.to_str().unwrap(), "--epsilon", "inf", "--out", run.to_str().unwrap()]);
    run_ok(&["oracle", "--pmf", pmf.to_str().unwrap(), "--candidate", run.to_str().unwrap(), "--out", scored.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&scored).unwrap()).unwrap();
    assert_eq!(v["score"]["precision"], 1.0);
    assert_eq!(v["score"]["recall"], 1.0);
    assert_eq!(v["score"]["fn"], 0);
    assert_eq!(v["meta"]["partitions"], "4140");
}

#[test]
fn robust_map_marks_kept_points() {
    let dir = TempDir::new().unwrap();
    let counts = dir.path().join("c.csv");
    multinomial_sample(&sample_simplex(7, 4, 30).unwrap(), 300, 5)
        .unwrap()
        .write_csv(std::fs::File::create(&counts).unwrap())
        .unwrap();
    let out = dir.path().join("r.json");
    run_ok(&["robust-map", "--counts", counts.to_str().unwrap(), "--epsilon", "0.02", "--z", "1", "--out", out.to_str().unwrap()]);
    let doc = read_doc(&out);
    assert!(doc.points.iter().all(|p| p.kept.is_some() && p.dh.is_some() && p.di.is_some()));
    let kept = doc.points.iter().filter(|p| p.kept == Some(true)).count();
    assert_eq!(kept as u64, doc.meta["kept"].as_u64().unwrap());
    assert!(kept >= 1);
}

#[test]
fn symmetric_map_on_the_units_mod_40() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("g.json");
    run_ok(&["symmetric-map", "--group", "zmod40x", "--epsilon", "0.05", "--seed", "7", "--out", out.to_str().unwrap()]);
    let doc = read_doc(&out);
    for k in 1..=4 {
        let k = k as f64;
        assert!(doc.points.iter().any(|p| (p.h - k).abs() < 1e-9 && (p.i - k).abs() < 1e-9));
    }
    assert_eq!(doc.meta["labels"].as_array().unwrap().len(), 16);
}

#[test]
fn group_file_feeds_symmetric_map() {
    let dir = TempDir::new().unwrap();
    let triple = dir.path().join("pauli.csv");
    let labels = dir.path().join("labels.txt");
    run_ok(&["group", "pauli", "--out", triple.to_str().unwrap(), "--labels", labels.to_str().unwrap()]);
    let text = std::fs::read_to_string(&labels).unwrap();
    assert_eq!(text.lines().count(), 16);
    assert!(text.lines().any(|l| l == "-iZ"));
    assert_eq!(std::fs::read_to_string(&triple).unwrap().lines().count(), 256);
    let out = dir.path().join("s.csv");
    run_ok(&["symmetric-map", "--triple", triple.to_str().unwrap(), "--epsilon", "0", "--format", "csv", "--out", out.to_str().unwrap()]);
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("H,I,dH,dI,clusters,dmc,hull,kept,encoder\n"));
}

#[test]
fn bigram_ingestion_and_counts_input() {
    let dir = TempDir::new().unwrap();
    let text = dir.path().join("t.txt");
    std::fs::write(&text, "The quick brown fox jumps over the lazy dog. ".repeat(50)).unwrap();
    let counts = dir.path().join("bigrams.csv");
    run_ok(&["ingest-bigrams", text.to_str().unwrap(), "--out", counts.to_str().unwrap()]);
    let rows: Vec<String> = std::fs::read_to_string(&counts).unwrap().lines().map(String::from).collect();
    assert_eq!(rows.len(), 27);
    assert!(rows.iter().all(|r| r.split(',').count() == 27));
    // rows of letters that never occur are all zero, which map accepts after normalizing
    let out = dir.path().join("m.json");
    run_ok(&["map", "--counts", counts.to_str().unwrap(), "--epsilon", "0", "--out", out.to_str().unwrap()]);
    assert!(read_doc(&out).points.len() > 2);

    let empty = dir.path().join("e.txt");
    std::fs::write(&empty, "!!").unwrap();
    assert_eq!(dibmap_cli::run(["dibmap", "ingest-bigrams", empty.to_str().unwrap()]), 1);
}

#[test]
fn scaling_tables() {
    let out = bin()
        .args(["scaling", "--copula", "countermonotone", "--n", "8,32", "--trials", "10"])
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "n,mean,std\n8,8.0,0.0\n32,32.0,0.0\n");
    let out = bin()
        .args(["scaling", "--dib", "oracle", "--n", "3,4,5", "--trials", "2", "--ny", "3", "--format", "json"])
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rows"][2]["mean_points_searched"], 52.0);
    assert!(v["loglog_fit"]["slope"].is_number());
}
