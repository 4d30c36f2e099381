use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn proxdist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_proxdist")).args(args).output().expect("binary runs")
}

fn summary(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("summary is JSON")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn synthetic_metric_reaches_feasibility() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let sol = dir.path().join("x.csv");
    let out = proxdist(&["metric", "--synthetic", "--m", "16", "--seed", "7", "--solver", "sd", "--trace", p(&trace), "--out", p(&sol)]);
    let s = summary(&out);
    assert_eq!(s["problem"], "metric");
    assert!(s["distance"].as_f64().unwrap() <= 1e-2);
    let x = proxdist_cli::io::read_matrix_csv(&sol).unwrap();
    assert_eq!(x.shape(), (16, 16));
    assert_eq!(x, x.transpose());
    let lines = std::fs::read_to_string(&trace).unwrap();
    assert!(lines.lines().count() > 2);
}

#[test]
fn summary_carries_problem_defaults() {
    let cases: [(&[&str], f64, f64, u64, u64); 3] = [
        (&["metric", "--synthetic", "--m", "6"], 1e-3, 1e-2, 200, 100_000),
        (&["cvxreg", "--synthetic", "--m", "10"], 1e-3, 1e-2, 200, 10_000),
        (&["condnum", "--synthetic", "--p", "5", "--a", "2"], 1e-3, 1e-2, 200, 10_000),
    ];
    for (args, grad, dist, outer, inner) in cases {
        let s = summary(&proxdist(args));
        let st = &s["config"]["stopping"];
        assert_eq!(st["grad_tol"].as_f64(), Some(grad), "{args:?}");
        assert_eq!(st["dist_tol"].as_f64(), Some(dist), "{args:?}");
        assert_eq!(st["max_outer"].as_u64(), Some(outer), "{args:?}");
        assert_eq!(st["max_inner"].as_u64(), Some(inner), "{args:?}");
        assert_eq!(st["progress_tol"].as_f64(), Some(1e-6), "{args:?}");
    }
}

#[test]
fn feasible_spectrum_is_returned_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let sigma = dir.path().join("sigma.csv");
    let sol = dir.path().join("out.csv");
    std::fs::write(&sigma, "2\n3\n4\n").unwrap();
    let s = summary(&proxdist(&["condnum", "--sigma", p(&sigma), "--c", "3", "--out", p(&sol)]));
    assert_eq!(s["distance"].as_f64(), Some(0.0));
    let x = proxdist_cli::io::read_matrix_csv(&sol).unwrap();
    assert_eq!(x.as_slice(), &[4.0, 3.0, 2.0]);
}

#[test]
fn zero_level_denoise_returns_the_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.pgm");
    let output = dir.path().join("out.pgm");
    let mut bytes = b"P5\n5 3\n255\n".to_vec();
    bytes.extend((0..15u8).map(|i| i * 17));
    std::fs::write(&input, &bytes).unwrap();
    summary(&proxdist(&["denoise", "--input", p(&input), "--levels", "0", "--out", p(&output)]));
    assert_eq!(std::fs::read(&output).unwrap(), bytes);
}

#[test]
fn cluster_labels_file_is_scored() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("x.csv");
    let labels = dir.path().join("y.csv");
    std::fs::write(&data, "0,0\n0.1,0\n0,0.1\n5,5\n5.1,5\n5,5.1\n").unwrap();
    std::fs::write(&labels, "1\n1\n1\n2\n2\n2\n").unwrap();
    let s = summary(&proxdist(&["cluster", "--input", p(&data), "--labels", p(&labels), "--knn", "2", "--s-step", "0.2"]));
    assert_eq!(s["details"]["best_ari"].as_f64(), Some(1.0));
}

#[test]
fn runs_are_deterministic() {
    let run = || {
        let mut s = summary(&proxdist(&["cvxreg", "--synthetic", "--m", "15", "--seed", "3", "--replicates", "2"]));
        for r in s["replicates"].as_array_mut().unwrap() {
            r.as_object_mut().unwrap().remove("wall_time_s");
        }
        s
    };
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    let reps = a["replicates"].as_array().unwrap();
    assert_eq!(reps.len(), 2);
    assert_eq!(reps[1]["seed"].as_u64(), Some(4));
    assert_ne!(reps[0]["loss"], reps[1]["loss"]);
}

#[test]
fn selftest_passes() {
    let out = proxdist(&["selftest"]);
    assert!(out.status.success());
    assert!(!String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "1,2\n3\n").unwrap();
    let out = proxdist(&["metric", "--input", p(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    std::fs::write(&bad, "0,1\n2,0\n").unwrap();
    assert_eq!(proxdist(&["metric", "--input", p(&bad)]).status.code(), Some(1));
    assert_eq!(proxdist(&["metric", "--input", p(&dir.path().join("missing.csv"))]).status.code(), Some(1));
    assert_eq!(proxdist(&["metric", "--synthetic", "--dist-tol", "-1"]).status.code(), Some(1));
    assert_eq!(proxdist(&["condnum", "--synthetic"]).status.code(), Some(1));
    assert_eq!(proxdist(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(proxdist(&["--help"]).status.code(), Some(0));
    assert_eq!(proxdist(&["metric", "--synthetic", "--m", "4", "--max-outer", "1", "--max-inner", "1"]).status.code(), Some(0));
}
