use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lamehardy(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lamehardy"))
        .args(args)
        .current_dir(dir)
        .env_remove("LAMEHARDY_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn passing_suite_exits_zero_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = lamehardy(
        &[
            "verify",
            "--suite",
            "algebra",
            "--m",
            "4",
            "--out",
            "report.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("report.json"));
    assert_eq!(report["suite"], "algebra");
    assert_eq!(report["parameters"]["m"], 4);
    assert_eq!(report["pass"], true);
    assert!(String::from_utf8_lossy(&out.stdout)
        .lines()
        .all(|l| l.starts_with("PASS ")));
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = lamehardy(
        &[
            "verify", "--suite", "cauchy", "--level", "2", "--out", "r.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 1);
    let report = read_json(&dir.path().join("r.json"));
    assert_eq!(report["pass"], false);
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL cauchy/jump_"));
}

#[test]
fn configuration_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 7] = [
        &["verify", "--suite", "nonexistent"],
        &["verify", "--suite", "hardy", "--mu", "-1"],
        &["verify", "--suite", "hardy", "--lambda", "-5"],
        &["verify", "--suite", "involution", "--level", "12"],
        &["verify", "--suite", "hardy", "--m", "6"],
        &["converge", "--suite", "holder", "--levels", "1,2"],
        &["decompose", "--jet", "missing.json", "--out-prefix", "p"],
    ];
    for args in cases {
        let out = lamehardy(args, dir.path());
        assert_eq!(code(&out), 2, "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn bad_thread_cap_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    for value in ["0", "many"] {
        let out = Command::new(env!("CARGO_BIN_EXE_lamehardy"))
            .args(["verify", "--suite", "algebra"])
            .current_dir(dir.path())
            .env("LAMEHARDY_THREADS", value)
            .output()
            .unwrap();
        assert_eq!(code(&out), 2, "LAMEHARDY_THREADS={value}");
    }
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "verify",
        "--suite",
        "involution",
        "--level",
        "2",
        "--seed",
        "7",
        "--out",
    ];
    let first = lamehardy(&[&args[..], &["a.json"]].concat(), dir.path());
    assert_eq!(code(&first), 0);
    let again = lamehardy(&[&args[..], &["b.json"]].concat(), dir.path());
    assert_eq!(code(&again), 0);
    let capped = Command::new(env!("CARGO_BIN_EXE_lamehardy"))
        .args([&args[..], &["c.json"]].concat())
        .current_dir(dir.path())
        .env("LAMEHARDY_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&capped), 0);
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.json")).unwrap());
    assert_eq!(a, std::fs::read(dir.path().join("c.json")).unwrap());
    assert!(!String::from_utf8_lossy(&a).contains("seconds"));
}

#[test]
fn timings_are_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let out = lamehardy(
        &[
            "verify",
            "--suite",
            "kernels",
            "--timings",
            "--out",
            "t.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let report = read_json(&dir.path().join("t.json"));
    assert!(report["checks"][0]["seconds"].is_number());
}

#[test]
fn decompose_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = lamehardy(
        &[
            "make-jet",
            "--kind",
            "random_poly:3:11",
            "--level",
            "2",
            "--out",
            "jet.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = lamehardy(
        &[
            "decompose",
            "--jet",
            "jet.json",
            "--out-prefix",
            "parts",
            "--level",
            "2",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));

    let jet = read_json(&dir.path().join("jet.json"));
    let plus = read_json(&dir.path().join("parts_plus.json"));
    let minus = read_json(&dir.path().join("parts_minus.json"));
    let report = read_json(&dir.path().join("parts_report.json"));
    assert_eq!(report["suite"], "decompose");
    assert_eq!(report["pass"], true);

    let flat = |v: &Value| -> Vec<f64> {
        let mut out = Vec::new();
        collect_numbers(&v["f0"], &mut out);
        collect_numbers(&v["grad"], &mut out);
        out
    };
    let (f, p, m) = (flat(&jet), flat(&plus), flat(&minus));
    assert!(!f.is_empty());
    assert_eq!(f.len(), p.len());
    for ((f, p), m) in f.iter().zip(&p).zip(&m) {
        assert!(
            (p + m - f).abs() <= 1e-12 * (1.0 + f.abs()),
            "{p} + {m} vs {f}"
        );
    }
}

#[test]
fn decompose_rejects_level_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let out = lamehardy(
        &[
            "make-jet",
            "--kind",
            "coordinate",
            "--level",
            "1",
            "--out",
            "jet.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let out = lamehardy(
        &[
            "decompose",
            "--jet",
            "jet.json",
            "--out-prefix",
            "p",
            "--level",
            "2",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn converge_writes_a_csv_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = lamehardy(
        &[
            "converge",
            "--suite",
            "involution",
            "--levels",
            "1,2",
            "--csv",
            "conv.csv",
            "--out",
            "conv.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let csv = std::fs::read_to_string(dir.path().join("conv.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "level,nodes,h,residual,observed_order");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("1,80,"));
    assert!(lines[2].starts_with("2,320,"));
    let report = read_json(&dir.path().join("conv.json"));
    assert_eq!(report["convergence"].as_array().unwrap().len(), 2);
}

fn collect_numbers(v: &Value, out: &mut Vec<f64>) {
    match v {
        Value::Number(n) => out.push(n.as_f64().unwrap()),
        Value::Array(items) => items.iter().for_each(|x| collect_numbers(x, out)),
        Value::Object(map) => collect_numbers(&map["coeffs"], out),
        _ => {}
    }
}
