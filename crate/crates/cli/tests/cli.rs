use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn stcp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stcp"))
        .args(args)
        .output()
        .expect("run stcp")
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name]
        .iter()
        .collect();
    p.to_str().unwrap().to_string()
}

fn payload(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    v["payload"].clone()
}

#[test]
fn report_envelope_fields() {
    let out = stcp(&["check-r0", "builtin:identity"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in ["command", "config", "payload", "seed", "version"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!(v.get("wall_clock_seconds").is_none());
    assert_eq!(v["command"], "check-r0");
    assert_eq!(v["payload"]["verdict"], "IS_R0");
    let timed = stcp(&["--timing", "check-r0", "builtin:identity"]);
    let t: Value = serde_json::from_slice(&timed.stdout).unwrap();
    assert!(t["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn fixtures_give_their_documented_results() {
    let id = payload(&stcp(&["solve", &fixture("identity_singleton.json"), "--ncp", "min"]));
    let x: Vec<f64> = id["x_star"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert!((x[0] - 1.0).abs() <= 1e-4 && (x[1] - 2.0).abs() <= 1e-4, "{x:?}");

    let pair = payload(&stcp(&["check-sr0", &fixture("example4_1_pair.json")]));
    assert_eq!(pair["verdict"], "NOT_R0");
    assert_eq!(pair["claim"]["agrees"], false);

    let lin = payload(&stcp(&["check-sr0", &fixture("linear_q_generator.json")]));
    assert_eq!(lin["verdict"], "NOT_R0");
    assert_eq!(lin["claim"]["agrees"], true);

    let ray = payload(&stcp(&[
        "ray-probe",
        &fixture("linear_q_generator.json"),
        "--direction",
        "1,0,0,0,0",
    ]));
    assert_eq!(ray["verdict"], "BOUNDED");
}

#[test]
fn example_dump_round_trips_through_the_parser() {
    let dir = tempfile::tempdir().unwrap();
    for name in stcp::io::BUILTIN_NAMES {
        let out = stcp(&["example", name]);
        assert!(out.status.success());
        let path = dir.path().join(format!("{name}.json"));
        std::fs::write(&path, &out.stdout).unwrap();
        let parsed = stcp::io::parse_problem_path(&path).unwrap();
        assert_eq!(parsed.file, stcp::io::builtin_example(name, 3, 3).unwrap());
        let a = stcp(&["check-sr0", path.to_str().unwrap()]);
        let b = stcp(&["check-sr0", &format!("builtin:{name}")]);
        assert_eq!(payload(&a), payload(&b), "{name}");
    }
}

#[test]
fn seed_and_options_are_echoed_in_config() {
    let out = stcp(&["--seed", "9", "--starts", "3", "solve", "builtin:identity"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"], 9);
    assert_eq!(v["payload"]["starts"].as_array().unwrap().len(), 3);
    let other = stcp(&["--seed", "10", "--starts", "3", "solve", "builtin:identity"]);
    assert_ne!(out.stdout, other.stdout);
}

#[test]
fn output_flag_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = stcp(&["--output", path.to_str().unwrap(), "xi", "builtin:example4_2"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written = std::fs::read(&path).unwrap();
    assert_eq!(written, stcp(&["xi", "builtin:example4_2"]).stdout);
}

#[test]
fn replay_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = stcp(&["check-r0", "builtin:example4_2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    std::fs::write(&path, text.replace("NOT_R0", "IS_R0")).unwrap();
    let replay = stcp(&["replay", path.to_str().unwrap(), "--verify"]);
    assert_eq!(replay.status.code(), Some(3));
    std::fs::write(&path, &text).unwrap();
    assert_eq!(
        stcp(&["replay", path.to_str().unwrap(), "--verify"]).status.code(),
        Some(0)
    );
}

#[test]
fn input_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"order": 2, "dim": 2, "samples": [
            {"weight": 0.5, "entries": [[[0, 0], 1.0]], "q": [0.0, 0.0]},
            {"weight": 0.4, "entries": [[[1, 1], 1.0]], "q": [0.0, 0.0]}]}"#,
    )
    .unwrap();
    let out = stcp(&["check-sr0", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("samples[*].weight") && err.contains("weights sum to 0.9"),
        "{err}"
    );

    assert_eq!(stcp(&["check-r0", "builtin:nope"]).status.code(), Some(2));
    assert_eq!(stcp(&["check-r0", "/does/not/exist.json"]).status.code(), Some(2));
    assert_eq!(
        stcp(&["ray-probe", "builtin:identity", "--direction", "1,0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        stcp(&["check-r0", &fixture("example4_1_pair.json"), "--realization", "5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(stcp(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(stcp(&["stability", "builtin:zero"]).status.code(), Some(2));
}

#[test]
fn summary_only_drops_per_direction_probes() {
    let full = payload(&stcp(&["coercivity-scan", "builtin:identity"]));
    let short = payload(&stcp(&["coercivity-scan", "builtin:identity", "--summary-only"]));
    assert_eq!(full["aggregate"], short["aggregate"]);
    assert!(!full["probes"].as_array().unwrap().is_empty());
    assert!(short["probes"].as_array().is_none_or(|p| p.is_empty()));
}
