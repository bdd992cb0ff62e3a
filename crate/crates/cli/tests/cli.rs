use std::io::Write;
use std::process::{Command, Output};

fn ris(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ris"))
        .args(args)
        .env("RIS_THREADS", "2")
        .output()
        .expect("failed to run ris")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn channel_file(body: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(body.as_bytes()).unwrap();
    f
}

fn solve_json(file: &str, method: &str) -> serde_json::Value {
    let out = ris(&[
        "solve",
        "--channels",
        file,
        "--phase-range",
        "90",
        "--num-phases",
        "2",
        "--method",
        method,
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_str(stdout(&out).trim()).unwrap()
}

#[test]
fn solve_toy_instance() {
    let f = channel_file(r#"{"beta": [1, 1], "alpha": [0, 0]}"#);
    let path = f.path().to_str().unwrap();
    let v = solve_json(path, "alg1");
    assert!((v["objective"].as_f64().unwrap() - 3.41421).abs() < 1e-5);
    assert_eq!(v["gains"], serde_json::json!([1]));
    for key in [
        "theta_idx",
        "snr_boost",
        "normalized_performance",
        "events_processed",
        "complex_additions",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let theta = v["theta_idx"][0].as_u64().unwrap();
    assert!(theta == 1 || theta == 2);
}

#[test]
fn oracle_agrees_with_sweep() {
    let f =
        channel_file(r#"{"beta": [0.3, 1.0, 0.4, 1.7, 0.9], "alpha": [0.2, -2.9, 1.1, 0.4, 2.2]}"#);
    let path = f.path().to_str().unwrap();
    let a = solve_json(path, "alg1");
    let b = solve_json(path, "oracle");
    assert_eq!(a["objective"], b["objective"]);
    let a = solve_json(path, "alg2");
    let b = solve_json(path, "oracle-onoff");
    assert_eq!(a["objective"], b["objective"]);
}

#[test]
fn blocked_direct_link_gives_null_boost() {
    let f = channel_file(
        "{\"beta\": [0, 2], \"alpha\": [0, 1]}\n{\"beta\": [1, 1], \"alpha\": [0, 0]}\n",
    );
    let out = ris(&[
        "solve",
        "--channels",
        f.path().to_str().unwrap(),
        "--phases=-1,1",
        "--method",
        "npq",
    ]);
    assert!(out.status.success());
    let lines: Vec<serde_json::Value> = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0]["snr_boost"].is_null());
    assert!(lines[1]["snr_boost"].is_number());
}

#[test]
fn solve_errors() {
    let out = ris(&["solve", "--phase-range", "90", "--num-phases", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());

    let f = channel_file("{\"beta\": [1, 1]");
    let out = ris(&[
        "solve",
        "--channels",
        f.path().to_str().unwrap(),
        "--phase-range",
        "90",
        "--num-phases",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());

    let f = channel_file(r#"{"beta": [1, 1], "alpha": [0, 0]}"#);
    let out = ris(&[
        "solve",
        "--channels",
        f.path().to_str().unwrap(),
        "--phase-range",
        "180",
        "--num-phases",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let big = format!(
        r#"{{"beta": {:?}, "alpha": {:?}}}"#,
        vec![1.0; 30],
        vec![0.0; 30]
    );
    let f = channel_file(&big);
    let out = ris(&[
        "solve",
        "--channels",
        f.path().to_str().unwrap(),
        "--phase-range",
        "90",
        "--num-phases",
        "2",
        "--method",
        "oracle",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
}

const SWEEP: &[&str] = &[
    "sweep",
    "--experiment",
    "perf-vs-n",
    "--methods",
    "npq,alg2",
    "--phase-range",
    "90",
    "--num-phases",
    "2",
    "--n",
    "16,64,256",
    "--trials",
    "200",
    "--seed",
    "7",
    "--aggregate",
];

#[test]
fn sweep_aggregate_rows_and_determinism() {
    let a = ris(SWEEP);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let text = stdout(&a);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "method,R_deg,K,N,mean_boost,mean_normperf,p5,p25,p50,p75,p95"
    );
    assert_eq!(lines.len(), 1 + 6);

    let b = Command::new(env!("CARGO_BIN_EXE_ris"))
        .args(SWEEP)
        .env("RIS_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sweep_to_file_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let out = ris(&[
        "sweep",
        "--methods",
        "enpq",
        "--phase-range",
        "60,120",
        "--num-phases",
        "3",
        "--n",
        "8",
        "--trials",
        "5",
        "--seed",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("method,R_deg,K,N,trial,snr_boost,normalized_performance\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 5);
}

#[test]
fn sweep_rejects_invalid_cells() {
    let out = ris(&[
        "sweep",
        "--phase-range",
        "180",
        "--num-phases",
        "2",
        "--n",
        "8",
        "--trials",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let out = ris(&[
        "sweep",
        "--methods",
        "oracle",
        "--phase-range",
        "90",
        "--num-phases",
        "2",
        "--n",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ratio_values() {
    let out = ris(&["ratio", "--phase-range", "90", "--num-phases", "2"]);
    assert_eq!(stdout(&out), "0.202642\n");
    let out = ris(&[
        "ratio",
        "--phase-range",
        "1e-6",
        "--num-phases",
        "4",
        "--on-off",
    ]);
    assert_eq!(stdout(&out), "0.101321\n");
    let out = ris(&["ratio", "--phases", "-1.5708,0,1.5708"]);
    let v: f64 = stdout(&out).trim().parse().unwrap();
    assert!((v - 0.590543).abs() < 2e-6);
    let out = ris(&["ratio", "--phase-range", "180", "--num-phases", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn ratio_table() {
    let out = ris(&["ratio", "--table", "--on-off"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "R_deg,K2,K3,K4,K6,K8");
    assert_eq!(lines.len(), 360);
    // K = 2 stops below 180 degrees
    assert!(lines[180].starts_with("180,,"));
}
