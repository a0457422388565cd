//! End-to-end checks of the binary: outputs, exit codes, and the
//! stdin-driven codec.

use std::io::Write as _;
use std::process::{Command, Output, Stdio};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaingraph"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_gaingraph"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

#[test]
fn regions_examples() {
    let o = run(&["regions", "--preset", "shi", "-n", "4"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "125");

    let o = run(&["regions", "-n", "1", "-a", "0", "-b", "0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1");

    let o = run(&["regions", "-n", "3", "-a", "-1", "-b", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "49");
}

#[test]
fn regions_cross_check_agrees() {
    for preset in ["braid", "linial", "shi", "catalan"] {
        let o = run(&["regions", "--preset", preset, "-n", "3", "--cross-check"]);
        assert!(o.status.success(), "{}: {:?}", preset, o);
        let text = stdout(&o);
        assert!(text.contains("regions ="), "{}", text);
    }
}

#[test]
fn charpoly_output() {
    let o = run(&["charpoly", "-n", "2", "--preset", "shi"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "chi(q) = q^2 - 2*q\nreduced(q) = q - 2");

    // interpolation matches the closed form
    let f = run(&["charpoly", "-n", "3", "--preset", "catalan", "--format", "csv"]);
    let i = run(&[
        "charpoly", "-n", "3", "--preset", "catalan", "--format", "csv", "--method",
        "interpolate",
    ]);
    assert!(f.status.success() && i.status.success());
    assert_eq!(f.stdout, i.stdout);
}

#[test]
fn usage_errors_exit_2() {
    // preset and explicit bounds are mutually exclusive
    let o = run(&["regions", "-n", "3", "--preset", "shi", "-a", "0", "-b", "1"]);
    assert_eq!(o.status.code(), Some(2));
    // unknown preset
    let o = run(&["regions", "-n", "3", "--preset", "weyl"]);
    assert_eq!(o.status.code(), Some(2));
    // empty gain interval
    let o = run(&["regions", "-n", "3", "-a", "2", "-b", "1"]);
    assert_eq!(o.status.code(), Some(2));
    // missing graph selection
    let o = run(&["poincare", "-n", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn guard_violations_exit_3() {
    let o = run(&["regions", "-n", "9", "--preset", "shi", "--method", "nbc"]);
    assert_eq!(o.status.code(), Some(3));
    // raising the guard admits the instance elsewhere; here n=7 passes
    let o = run(&[
        "regions", "-n", "7", "--preset", "braid", "--method", "nbc", "--max-n", "7",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "5040");
    // the point-counting budget is a guard too
    let o = run(&[
        "regions", "-n", "9", "--preset", "catalan", "--method", "charpoly",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn nbc_list_and_profile() {
    let o = run(&["nbc", "profile", "-n", "3", "--preset", "shi", "--format", "csv"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "edges,count\n0,1\n1,6\n2,9");

    let o = run(&["nbc", "list", "-n", "2", "--preset", "braid"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 2, "two NBC forests at n=2");
}

#[test]
fn codec_round_trip_via_pipe() {
    let forest = r#"[{"support":[1,2],"edges":["0(1,2)"],"heights":[0,0]}]"#;
    let encoded = run_with_stdin(&["bijection", "encode", "--preset", "shi"], forest);
    assert!(encoded.status.success(), "{:?}", encoded);
    let encoded_text = stdout(&encoded);
    assert_eq!(encoded_text, r#"[{"root":1,"edges":[{"parent":1,"child":2,"weight":1}]}]"#);

    let decoded = run_with_stdin(&["bijection", "decode", "--preset", "shi"], &encoded_text);
    assert!(decoded.status.success(), "{:?}", decoded);
    let back: serde_json::Value = serde_json::from_str(&stdout(&decoded)).unwrap();
    let original: serde_json::Value = serde_json::from_str(forest).unwrap();
    assert_eq!(back, original);

    // malformed input is a usage error
    let o = run_with_stdin(&["bijection", "decode", "--preset", "shi"], "not json");
    assert_eq!(o.status.code(), Some(2));
    // out-of-interval weight is rejected
    let bad = r#"{"root":1,"edges":[{"parent":1,"child":2,"weight":5}]}"#;
    let o = run_with_stdin(&["bijection", "decode", "--preset", "shi"], bad);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn roundtrip_passes_for_small_presets() {
    for preset in ["braid", "shi", "catalan"] {
        for n in 1..=4 {
            let o = run(&["bijection", "roundtrip", "-n", &n.to_string(), "--preset", preset]);
            assert!(o.status.success(), "{} n={}: {:?}", preset, n, o);
            assert!(stdout(&o).starts_with("ok:"), "{}", stdout(&o));
        }
    }
    // linial is outside the bijection's scope
    let o = run(&["bijection", "roundtrip", "-n", "3", "--preset", "linial"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_reports() {
    let o = run(&["verify", "-n", "3", "--grid", "(0,0),(0,1),(-1,1)", "--format", "plain"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.ends_with("all ok"), "{}", text);
    assert_eq!(text.lines().count(), 10, "9 cells plus the summary");

    let o = run(&["verify", "-n", "2", "--grid", "(1,1),(-1,2)", "--format", "json"]);
    assert!(o.status.success(), "{:?}", o);
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["ok"], serde_json::Value::Bool(true));
    assert_eq!(report["cells"].as_array().unwrap().len(), 4);

    // a bad grid is a usage error
    let o = run(&["verify", "-n", "2", "--grid", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("gaingraph-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("regions.txt");
    let o = run(&[
        "regions", "--preset", "shi", "-n", "3", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "16\n");
    std::fs::remove_dir_all(&dir).unwrap();
}
