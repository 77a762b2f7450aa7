use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn pb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pb"))
        .args(args)
        .env_remove("PB_WORKERS")
        .output()
        .expect("spawn pb")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

/// Asserts exit code 2 and a JSON error object naming `field`.
fn assert_usage_error(o: &Output, field: Option<&str>) -> Value {
    assert_eq!(
        o.status.code(),
        Some(2),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    let err: Value = serde_json::from_slice(&o.stderr).expect("stderr is JSON");
    let inner = &err["error"];
    assert!(inner["kind"].is_string());
    assert!(inner["message"].is_string());
    if let Some(f) = field {
        assert_eq!(inner["field"], f, "{err}");
    }
    err
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn eval_examples() {
    for (args, want) in [
        (
            ["--op", "rn", "--fn", "abs-mid", "--n", "6", "--x", "0"],
            "0.5",
        ),
        (
            [
                "--op",
                "bernstein",
                "--fn",
                "square",
                "--n",
                "2",
                "--x",
                "0.5",
            ],
            "0.375",
        ),
        (
            ["--op", "rn", "--fn", "linear", "--n", "10", "--x", "0.73"],
            "0.73",
        ),
    ] {
        let o = pb(&[&["eval"][..], &args[..]].concat());
        assert!(o.status.success());
        assert_eq!(stdout(&o).trim(), want);
    }
}

#[test]
fn eval_polya_zero_profile_matches_bernstein() {
    let b = pb(&[
        "eval",
        "--op",
        "bernstein",
        "--fn",
        "sin-pi",
        "--n",
        "7",
        "--x",
        "0.3",
    ]);
    let p = pb(&[
        "eval", "--op", "polya", "--c-mode", "zero", "--fn", "sin-pi", "--n", "7", "--x", "0.3",
    ]);
    let (b, p): (f64, f64) = (
        stdout(&b).trim().parse().unwrap(),
        stdout(&p).trim().parse().unwrap(),
    );
    assert!((b - p).abs() < 1e-13);
}

#[test]
fn eval_grid_csv() {
    let o = pb(&[
        "eval", "--op", "rn", "--fn", "linear", "--n", "5", "--points", "11",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,fx,opx,error"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 11);
    for r in rows {
        assert!(r[3] < 1e-14, "{r:?}");
        assert!((r[0] - r[1]).abs() < 1e-15);
    }
}

#[test]
fn eval_sampled_table() {
    let path = tmp("square.csv");
    let mut body = String::from("x,fx\n");
    for i in 0..=200 {
        let x = f64::from(i) / 200.0;
        body.push_str(&format!("{x},{}\n", x * x));
    }
    std::fs::write(&path, body).unwrap();
    let o = pb(&[
        "eval",
        "--op",
        "bernstein",
        "--fn-csv",
        path.to_str().unwrap(),
        "--n",
        "2",
        "--x",
        "0.5",
    ]);
    assert!(o.status.success());
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 0.375).abs() < 1e-12);

    let bad = tmp("bad.csv");
    std::fs::write(&bad, "x,fx\n0.5,1\n0.2,3\n").unwrap();
    let o = pb(&[
        "eval",
        "--op",
        "rn",
        "--fn-csv",
        bad.to_str().unwrap(),
        "--n",
        "3",
        "--x",
        "0.5",
    ]);
    assert_usage_error(&o, Some("fn-csv"));
}

#[test]
fn usage_errors_are_json() {
    assert_usage_error(
        &pb(&["eval", "--op", "rn", "--fn", "nope", "--n", "6", "--x", "0"]),
        Some("fn"),
    );
    assert_usage_error(
        &pb(&[
            "eval", "--op", "rn", "--fn", "linear", "--n", "6", "--x", "1.5",
        ]),
        Some("x"),
    );
    assert_usage_error(
        &pb(&[
            "eval", "--op", "xx", "--fn", "linear", "--n", "6", "--x", "0",
        ]),
        Some("op"),
    );
    assert_usage_error(
        &pb(&[
            "eval", "--op", "rn", "--fn", "linear", "--n", "abc", "--x", "0",
        ]),
        Some("n"),
    );
    assert_usage_error(
        &pb(&[
            "eval", "--op", "rn", "--c-mode", "rn", "--fn", "linear", "--n", "6", "--x", "0",
        ]),
        Some("c-mode"),
    );
    assert_usage_error(&pb(&["scan", "--sikkema", "--n", "9..2"]), Some("n"));
    assert_usage_error(
        &pb(&["scan", "--sikkema", "--c-mode", "sometimes"]),
        Some("c-mode"),
    );
    assert_usage_error(
        &pb(&["scan", "--sikkema", "--points", "10"]),
        Some("points"),
    );
    assert_usage_error(
        &pb(&["scan", "--popoviciu", "--fn", "one", "--n", "3"]),
        Some("fn"),
    );
    assert_usage_error(&pb(&["verify", "--lemma", "--n", "1..5"]), Some("n"));
    assert_usage_error(
        &pb(&[
            "--workers",
            "0",
            "eval",
            "--op",
            "rn",
            "--fn",
            "linear",
            "--n",
            "3",
            "--x",
            "0",
        ]),
        Some("workers"),
    );
    assert_usage_error(&pb(&["scan"]), None);
    assert_usage_error(&pb(&["scan", "--sikkema", "--popoviciu"]), None);
    assert_usage_error(&pb(&["verify"]), None);
    assert_usage_error(&pb(&[]), None);
}

#[test]
fn io_error_is_exit_2() {
    let o = pb(&[
        "scan",
        "--sikkema",
        "--n",
        "3",
        "--out",
        "/nonexistent-dir/x.json",
    ]);
    let err = assert_usage_error(&o, None);
    assert_eq!(err["error"]["kind"], "io");
}

#[test]
fn help_and_version_exit_0() {
    assert!(pb(&["--help"]).status.success());
    assert!(pb(&["--version"]).status.success());
}

#[test]
fn scan_sikkema_rn_n6() {
    let o = pb(&["scan", "--sikkema", "--n", "6..6", "--c-mode", "rn"]);
    assert!(o.status.success());
    let r = json_out(&o);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["kind"], "sikkema");
    assert!(r["sup"].as_f64().unwrap() <= 1.069_913_4 + 1e-6);
}

#[test]
fn scan_sikkema_table_and_curve() {
    let csv = tmp("curve.csv");
    let o = pb(&[
        "scan",
        "--sikkema",
        "--n",
        "2..30",
        "--c-mode",
        "zero",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let r = json_out(&o);
    let rows = r["per_n"].as_array().unwrap();
    assert_eq!(rows.len(), 29);
    assert_eq!(r["argmax_n"], 6);
    for row in rows.iter().filter(|row| row["n"] != 6) {
        assert!(row["sup"].as_f64().unwrap() <= 1.0897 + 5e-5, "{row}");
    }
    let curve = std::fs::read_to_string(csv).unwrap();
    assert!(curve.starts_with("n,x,value\n"));
    assert!(curve.lines().count() > 29 * 10001);
}

#[test]
fn scan_popoviciu_abs_mid() {
    let o = pb(&[
        "scan",
        "--popoviciu",
        "--fn",
        "abs-mid",
        "--op",
        "rn",
        "--n",
        "2..30",
    ]);
    assert!(o.status.success());
    let r = json_out(&o);
    assert_eq!(r["operator"], "rn");
    for row in r["per_n"].as_array().unwrap() {
        assert!(row["sup"].as_f64().unwrap() <= 1.089_70, "{row}");
    }
}

#[test]
fn verify_bundle() {
    let out = tmp("verify.json");
    let o = pb(&[
        "verify",
        "--lemma",
        "--kozniewska",
        "--n6",
        "--dominance",
        "--n",
        "2..12",
        "--points",
        "1001",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let bundle: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(bundle["schema"], 1);
    assert_eq!(bundle["passed"], true);
    let reports = bundle["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 4);
    assert!(reports.iter().all(|r| r["passed"] == true));
}

#[test]
fn conjecture_findings_do_not_fail() {
    let o = pb(&[
        "verify",
        "--conjecture",
        "--n",
        "2..6",
        "--points",
        "1001",
        "--c-samples",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let bundle = json_out(&o);
    let r = &bundle["reports"][0];
    assert_eq!(r["finding"], r["violations"].as_u64().unwrap() > 0);
    assert_eq!(bundle["passed"], true);
}

#[test]
fn compare_csv() {
    let o = pb(&["compare", "--fn", "abs-mid", "--n", "4", "--points", "5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,err_bernstein,err_rn");
    assert_eq!(lines.len(), 6);
    let mid: Vec<f64> = lines[3].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(mid[0], 0.5);
    assert!((mid[1] - 0.1875).abs() < 1e-15);
}

#[test]
fn output_independent_of_workers() {
    let cases: [&[&str]; 3] = [
        &["scan", "--sikkema", "--n", "2..12"],
        &[
            "scan",
            "--popoviciu",
            "--fn",
            "sawtooth",
            "--n",
            "2..12",
            "--points",
            "2001",
        ],
        &[
            "verify",
            "--lemma",
            "--kozniewska",
            "--conjecture",
            "--n",
            "2..8",
            "--points",
            "1001",
        ],
    ];
    for args in cases {
        let one = pb(&[&["--workers", "1"][..], args].concat());
        let many = pb(&[&["--workers", "4"][..], args].concat());
        let env = Command::new(env!("CARGO_BIN_EXE_pb"))
            .args(args)
            .env("PB_WORKERS", "3")
            .output()
            .unwrap();
        assert!(one.status.success());
        assert_eq!(one.stdout, many.stdout, "{args:?}");
        assert_eq!(one.stdout, env.stdout, "{args:?}");
    }
}
