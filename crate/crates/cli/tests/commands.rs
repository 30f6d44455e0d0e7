use std::process::{Command, Output};

fn blockmass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blockmass"))
        .args(args)
        .env_remove("BLOCKMASS_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = blockmass(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout)
        .unwrap()
        .trim_end()
        .to_string()
}

fn json(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

#[test]
fn autocorr() {
    assert_eq!(
        stdout(&["autocorr", "--base", "2", "--block", "111"]),
        "[1,1,1]"
    );
    assert_eq!(
        stdout(&["autocorr", "--base", "2", "--block", "101", "--format", "text"]),
        "1 + t^2"
    );
}

#[test]
fn coeffs_from_three_sources() {
    for source in ["closed", "automaton", "enumeration"] {
        let out = stdout(&[
            "coeffs", "--base", "2", "--block", "11", "--k", "0", "--maxlen", "6", "--source",
            source,
        ]);
        assert_eq!(out, "1,2,3,5,8,13,21", "{source}");
    }
}

#[test]
fn genfun() {
    let v = json(&["genfun", "--base", "10", "--block", "9", "--k", "0"]);
    assert_eq!(v, serde_json::json!({"num": ["1"], "den": ["1", "-9"]}));
    let v = json(&["genfun", "--base", "2", "--block", "11", "--series", "v0"]);
    assert_eq!(v["den"], serde_json::json!(["1", "-1", "-1"]));
}

#[test]
fn mass_and_expectations() {
    assert_eq!(
        stdout(&["mass", "--base", "10", "--block", "42", "--k", "1"]),
        "100/1"
    );
    assert_eq!(
        stdout(&["mass", "--base", "3", "--block", "12", "--k", "2", "--prefix", "1"]),
        "3/1"
    );
    let ok = blockmass(&[
        "mass", "--base", "2", "--block", "111", "--k", "0", "--expect", "14",
    ]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = blockmass(&[
        "mass", "--base", "2", "--block", "111", "--k", "0", "--expect", "13",
    ]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn measure() {
    let args = [
        "measure", "--base", "2", "--block", "1", "--k", "3", "--from", "2/4", "--to", "3/4",
    ];
    assert_eq!(stdout(&args), "1/2");
    assert_eq!(
        stdout(&[
            "measure", "--base", "2", "--block", "1", "--k", "3", "--from", "1/2^1", "--to", "1"
        ]),
        "1/1"
    );
    let csv = stdout(&[
        "measure",
        "--base",
        "3",
        "--block",
        "12",
        "--k",
        "3",
        "--resolution",
        "2",
    ]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "cell_index,n_over_bl,mass_num,mass_den");
    assert_eq!(lines.len(), 10);
    assert!(lines[1..].iter().all(|l| l.ends_with(",1,1")), "{csv}");
}

#[test]
fn sum_contains_two_and_is_thread_independent() {
    let base = [
        "sum", "--base", "2", "--block", "1", "--k", "1", "--depth", "24", "--expect", "2",
    ];
    let one = stdout(&[&base[..], &["--threads", "1"]].concat());
    let four = stdout(&[&base[..], &["--threads", "4"]].concat());
    assert_eq!(one, four);
    let v: serde_json::Value = serde_json::from_str(&one).unwrap();
    assert_eq!(v["upper"], "2/1");
    let miss = blockmass(&[
        "sum", "--base", "2", "--block", "1", "--k", "1", "--depth", "8", "--expect", "3",
    ]);
    assert_eq!(miss.status.code(), Some(1));
}

#[test]
fn limit() {
    let v = json(&[
        "limit", "--base", "2", "--block", "1", "--k", "1", "--depth", "12",
    ]);
    assert_eq!(v["verdict"], "verified");
    assert_eq!(v["bound"], "1/1");
}

#[test]
fn verify_passes_and_negative_control_fails() {
    let ok = blockmass(&[
        "verify", "--base", "2", "--block", "11", "--kmax", "4", "--maxlen", "12", "--depth", "16",
    ]);
    assert_eq!(ok.status.code(), Some(0));
    let ok = blockmass(&["verify", "--base", "3", "--block", "010"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = blockmass(&[
        "verify",
        "--base",
        "2",
        "--block",
        "11",
        "--mutate-correlation",
        "1",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&bad.stdout).unwrap();
    assert_eq!(report["passed"], false);
    assert_eq!(report["mutated_coefficient"], 1);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        blockmass(&["mass", "--base", "2", "--block", "3", "--k", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        blockmass(&["mass", "--base", "1", "--block", "0", "--k", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(blockmass(&["nonsense"]).status.code(), Some(2));
    let capped = Command::new(env!("CARGO_BIN_EXE_blockmass"))
        .args([
            "sum", "--base", "2", "--block", "1", "--k", "1", "--depth", "12",
        ])
        .env("BLOCKMASS_CAP", "100")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(2));
}

#[test]
fn deterministic_output() {
    let args = [
        "verify", "--base", "3", "--block", "12", "--kmax", "3", "--maxlen", "7", "--depth", "8",
    ];
    assert_eq!(stdout(&args), stdout(&args));
}
