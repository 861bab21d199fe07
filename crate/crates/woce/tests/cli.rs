//! End-to-end checks of the command-line surface and its file formats.

use std::fs;
use std::path::Path;
use std::process::Command;

fn woce() -> Command {
    Command::new(env!("CARGO_BIN_EXE_woce"))
}

fn run_ok(cmd: &mut Command) -> String {
    let out = cmd.output().expect("spawn woce");
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn synth_cluster_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("halfring.csv");
    let labels = dir.path().join("pred.csv");
    let truth = dir.path().join("truth.csv");
    let diag = dir.path().join("diag");

    run_ok(woce()
        .args(["synth", "halfring", "--n", "200", "--noise", "0.08", "--seed", "3"])
        .arg("--out")
        .arg(&data));
    let text = fs::read_to_string(&data).unwrap();
    assert_eq!(text.lines().count(), 200);
    // third column is the class label
    let truth_col: Vec<&str> = text
        .lines()
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    fs::write(&truth, truth_col.join("\n")).unwrap();

    run_ok(woce()
        .args([
            "cluster",
            "--k",
            "2",
            "--label-col",
            "last",
            "--ensemble-size",
            "8",
            "--seed",
            "1",
        ])
        .arg("--data")
        .arg(&data)
        .arg("--out")
        .arg(&labels)
        .arg("--diagnostics")
        .arg(&diag));
    let pred_text = fs::read_to_string(&labels).unwrap();
    assert_eq!(pred_text.lines().count(), 200);
    assert!(pred_text.lines().all(|l| l == "0" || l == "1"));

    // diagnostics: dense co-association matrix and the uniformity table
    let coassoc = fs::read_to_string(diag.join("coassociation.csv")).unwrap();
    assert_eq!(coassoc.lines().count(), 200);
    assert_eq!(coassoc.lines().next().unwrap().split(',').count(), 200);
    let uni = fs::read_to_string(diag.join("uniformity.csv")).unwrap();
    assert_eq!(uni.lines().count(), 9); // header + 8 committee slots
    assert!(uni.starts_with("partition,kind,k_t,uniformity_raw,weight"));

    let eval_out = run_ok(woce()
        .arg("eval")
        .arg("--pred")
        .arg(&labels)
        .arg("--truth")
        .arg(&truth));
    let line = eval_out.lines().next().unwrap();
    assert!(line.starts_with("accuracy="), "unexpected eval output {line:?}");
    assert!(line.contains(" nmi="));
    let acc: f64 = line
        .split_whitespace()
        .next()
        .unwrap()
        .trim_start_matches("accuracy=")
        .parse()
        .unwrap();
    assert!(acc >= 0.9, "half-ring accuracy {acc} unexpectedly low");
}

#[test]
fn constraints_flow_through_cluster() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("halfring.csv");
    let cons = dir.path().join("constraints.csv");
    let labels = dir.path().join("pred.csv");

    run_ok(woce()
        .args(["synth", "halfring", "--n", "200", "--noise", "0.1", "--seed", "5"])
        .arg("--out")
        .arg(&data));
    run_ok(woce()
        .args([
            "gen-constraints",
            "--label-col",
            "last",
            "--percent",
            "4",
            "--seed",
            "2",
        ])
        .arg("--data")
        .arg(&data)
        .arg("--out")
        .arg(&cons));
    let text = fs::read_to_string(&cons).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    // 4% of 200 = 8 instances -> 2 must + 2 cannot
    assert_eq!(lines.len(), 4);
    assert_eq!(lines.iter().filter(|l| l.ends_with(",must")).count(), 2);
    assert_eq!(lines.iter().filter(|l| l.ends_with(",cannot")).count(), 2);

    run_ok(woce()
        .args([
            "cluster",
            "--k",
            "2",
            "--label-col",
            "last",
            "--ensemble-size",
            "6",
            "--seed",
            "0",
        ])
        .arg("--data")
        .arg(&data)
        .arg("--constraints")
        .arg(&cons)
        .arg("--out")
        .arg(&labels));
    assert_eq!(fs::read_to_string(&labels).unwrap().lines().count(), 200);
}

#[test]
fn benchmark_prints_table_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("halfring.csv");
    let report = dir.path().join("report.csv");
    let config = dir.path().join("bench.cfg");

    run_ok(woce()
        .args(["synth", "halfring", "--n", "80", "--noise", "0.1", "--seed", "1"])
        .arg("--out")
        .arg(&data));
    fs::write(
        &config,
        format!(
            "dataset = {}\nk = 2\nruns = 2\nseed = 3\nensemble_size = 5\nlabel_col = last\nout = {}\n",
            data.display(),
            report.display()
        ),
    )
    .unwrap();

    let stdout = run_ok(woce().arg("benchmark").arg("--config").arg(&config));
    assert!(stdout.contains("dataset"), "missing table header: {stdout}");
    assert!(stdout.contains("woce"));
    assert!(stdout.contains("eac"));

    let csv = fs::read_to_string(&report).unwrap();
    assert!(csv.starts_with("dataset,method,mean_accuracy"));
    assert_eq!(csv.lines().count(), 3); // header + woce + eac
}

#[test]
fn cluster_rejects_missing_file() {
    let out = woce()
        .args(["cluster", "--k", "2", "--data", "/nonexistent.csv", "--out", "/tmp/x"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("error"), "stderr: {stderr}");
}

#[test]
fn eval_is_invariant_to_label_names() {
    let dir = tempfile::tempdir().unwrap();
    let pred = dir.path().join("pred.csv");
    let truth = dir.path().join("truth.csv");
    fs::write(&pred, "0\n0\n1\n1\n").unwrap();
    fs::write(&truth, "b\nb\na\na\n").unwrap();
    let out = run_ok(woce().arg("eval").arg("--pred").arg(&pred).arg("--truth").arg(&truth));
    assert!(out.contains("accuracy=1.000000"), "got {out}");
    assert!(out.contains("nmi=1.000000"), "got {out}");
    let _ = Path::new("unused");
}
