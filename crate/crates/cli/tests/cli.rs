//! End-to-end checks of the command-line interface: exit codes, output
//! determinism, and the provenance header.

use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::atomic::{AtomicU32, Ordering};

static COUNTER: AtomicU32 = AtomicU32::new(0);

fn scratch(name: &str) -> PathBuf {
    let id = COUNTER.fetch_add(1, Ordering::Relaxed);
    std::env::temp_dir().join(format!("sharing-market-test-{}-{id}-{name}", std::process::id()))
}

fn write_config(json: &str) -> PathBuf {
    let path = scratch("config.json");
    std::fs::write(&path, json).unwrap();
    path
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sharing-market"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

const DUO: &str = r#"{"q0": 10.0, "eps0": 2.0, "k": 1, "sellers": [
    {"id": 0, "q": 20.0, "c": 1.0, "cap": "inf"},
    {"id": 1, "q": 5.0, "c": 1.0, "cap": "inf"}
]}"#;

#[test]
fn verify_accepts_a_solo_disclosure_equilibrium() {
    let cfg = write_config(DUO);
    let out = run(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--alpha",
        "1,0",
        "--grid-step",
        "0.02",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"verified\": true"));
}

#[test]
fn verify_rejects_mutual_disclosure_and_prints_the_deviation() {
    let cfg = write_config(DUO);
    let out = run(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--alpha",
        "1,1",
        "--grid-step",
        "0.02",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"verified\": false"));
    assert!(text.contains("Disclosure"));
}

#[test]
fn malformed_config_exits_with_two() {
    let cfg = write_config(r#"{"q0": -3.0, "eps0": 2.0, "k": 1, "sellers": []}"#);
    let out = run(&["verify", "--config", cfg.to_str().unwrap(), "--alpha", "1,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_is_byte_identical_across_runs() {
    let cfg = write_config(DUO);
    let out_a = scratch("sim-a.csv");
    let out_b = scratch("sim-b.csv");
    for out in [&out_a, &out_b] {
        let res = run(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--alpha",
            "1,0",
            "--prices",
            "7,0",
            "--seed",
            "42",
            "--draws",
            "500",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(res.status.code(), Some(0));
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn tables_carry_a_provenance_header() {
    let cfg = write_config(DUO);
    let out = run(&["duopoly", "--config", cfg.to_str().unwrap(), "--alpha-step", "0.5"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let first = text.lines().next().unwrap();
    assert!(first.starts_with("# {"));
    let parsed: serde_json::Value = serde_json::from_str(&first[2..]).unwrap();
    assert_eq!(parsed["command"], "duopoly");
    assert_eq!(parsed["config"]["q0"], 10.0);
    assert!(text.lines().count() > 4);
}

#[test]
fn structure_map_labels_the_known_regions() {
    let cfg = write_config(DUO);
    let out = run(&[
        "structure-map",
        "--config",
        cfg.to_str().unwrap(),
        "--q-min",
        "1",
        "--q-max",
        "19",
        "--steps",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("none-discloses"));
    assert!(text.contains("low-never-discloses"));
    assert!(text.contains("all-achievable"));
}

#[test]
fn eligible_map_reports_the_displacement_bound() {
    let cfg = write_config(r#"{"q0": 10.0, "eps0": 2.0, "k": 32, "sellers": [
        {"id": 0, "q": 10.0, "c": 1.0}
    ]}"#);
    let out = run(&[
        "eligible-map",
        "--config",
        cfg.to_str().unwrap(),
        "--scenario",
        "unlimited",
        "--q-steps",
        "20",
        "--c-steps",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("displacement bound 19.000000"), "stderr: {err}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"displacement_bound\":19.0"));
}

#[test]
fn equilibria_report_lists_the_dominant_discloser() {
    let cfg = write_config(DUO);
    let out = run(&[
        "equilibria",
        "--config",
        cfg.to_str().unwrap(),
        "--scenario",
        "unlimited",
        "--grid-step",
        "0.02",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["scenario"], "unlimited");
    assert_eq!(report["equilibria"][0]["disclosers"][0], 0);
    assert_eq!(report["cardinality"][0], 1);
}

#[test]
fn ordering_command_checks_the_count_chain() {
    let cfg = write_config(r#"{"q0": 10.0, "eps0": 2.0, "k": 3, "sellers": [
        {"id": 0, "q": 20.0, "c": 1.0},
        {"id": 1, "q": 17.0, "c": 2.0},
        {"id": 2, "q": 16.5, "c": 2.0},
        {"id": 3, "q": 8.0, "c": 5.0}
    ]}"#);
    let out = run(&["ordering", "--config", cfg.to_str().unwrap(), "--omega", "2", "--grid-step", "0.02"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(report["ordered"], true);
    assert_eq!(report["unlimited"][1], 1);
    assert_eq!(report["single"][0], 3);
}
