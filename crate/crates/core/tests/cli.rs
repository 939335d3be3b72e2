//! End-to-end checks of the `gis` binary: exit codes, environment handling,
//! JSON output, the fixtures-then-verify loop, and the DOT golden file.

use std::path::Path;
use std::process::{Command, Output};

fn gis(args: &[&str], dir: &Path, envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gis"));
    cmd.args(args).current_dir(dir).env_remove("GIS_MODULUS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // Success.
    let ok = gis(&["orbit", "--seed", "0,4,7"], dir.path(), &[]);
    assert_eq!(ok.status.code(), Some(0));
    // Domain error: degenerate seed.
    let degenerate = gis(&["orbit", "--seed", "0,6"], dir.path(), &[]);
    assert_eq!(degenerate.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&degenerate.stderr).contains("tritone"));
    assert!(degenerate.stdout.is_empty());
    // Usage error: unknown flag.
    let usage = gis(&["orbit", "--sead", "0,4,7"], dir.path(), &[]);
    assert_eq!(usage.status.code(), Some(2));
    // Unknown subcommand.
    let unknown = gis(&["frobnicate"], dir.path(), &[]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn modulus_env_and_flag() {
    let dir = tempfile::tempdir().unwrap();
    // Non-degenerate seed mod 7 (odd modulus: any two distinct entries).
    let env_run = gis(
        &["orbit", "--seed", "0,1"],
        dir.path(),
        &[("GIS_MODULUS", "7")],
    );
    assert_eq!(env_run.status.code(), Some(0));
    assert!(stdout_of(&env_run).contains("(m=7): 14 segments"));
    // The flag wins over the environment.
    let flag_run = gis(
        &["orbit", "--seed", "0,1", "--modulus", "10"],
        dir.path(),
        &[("GIS_MODULUS", "7")],
    );
    assert!(stdout_of(&flag_run).contains("(m=10): 20 segments"));
    // Invalid modulus is a domain error.
    let bad = gis(&["orbit", "--seed", "0,1", "-m", "1"], dir.path(), &[]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn fixtures_then_check_network_all_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = gis(&["fixtures"], dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    let names: Vec<String> = stdout_of(&out).lines().map(str::to_owned).collect();
    assert_eq!(names.len(), 4);
    for name in &names {
        let check = gis(&["check-network", name], dir.path(), &[]);
        assert_eq!(check.status.code(), Some(0), "{name}");
        assert!(stdout_of(&check).contains("verdict: PASS"), "{name}");
    }
}

#[test]
fn check_network_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let doc = r#"{
        "modulus": 12,
        "systems": { "s": { "kind": "ti-orbit", "seed": "0,4,7" } },
        "nodes": {
            "a": { "system": "s", "segment": "0,4,7" },
            "b": { "system": "s", "segment": "1,5,8" }
        },
        "edges": [ { "from": "a", "to": "b", "op": "Q2" } ]
    }"#;
    let path = dir.path().join("bad.json");
    std::fs::write(&path, doc).unwrap();
    let out = gis(&["check-network", path.to_str().unwrap()], dir.path(), &[]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout_of(&out);
    assert!(
        text.contains("FAIL (computed 2,6,9, expected 1,5,8)"),
        "{text}"
    );
    assert!(text.contains("verdict: FAIL"));
    // A malformed document is a domain error, not a verification failure.
    let bad_path = dir.path().join("broken.json");
    std::fs::write(&bad_path, "{").unwrap();
    let out = gis(
        &["check-network", bad_path.to_str().unwrap()],
        dir.path(),
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_output_mirrors_text() {
    let dir = tempfile::tempdir().unwrap();
    let out = gis(
        &["contextual", "--seed", "0,4,7", "--format", "json"],
        dir.path(),
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(value["order"], 24);
    assert_eq!(value["dihedral"], true);
    assert_eq!(value["simply_transitive"], true);
    assert_eq!(value["dual_to_ti"], true);
    assert_eq!(value["elements"].as_array().unwrap().len(), 24);

    let out = gis(
        &["covers", "--octatonic", "01", "--format", "json"],
        dir.path(),
        &[],
    );
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(value["checked"], 56);
    assert_eq!(value["simply_transitive"], 56);

    let out = gis(
        &[
            "morphism",
            "--from-seed",
            "0,4,7",
            "--map",
            "aff(10,0)",
            "--format",
            "json",
        ],
        dir.path(),
        &[],
    );
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(value["monic"], false);
    assert_eq!(value["epic"], false);
    assert_eq!(value["iso"], false);

    // `--format dot` is only for export-dot.
    let out = gis(
        &["contextual", "--seed", "0,4,7", "--format", "dot"],
        dir.path(),
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_network_json_failure_keeps_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let doc = r#"{
        "modulus": 12,
        "systems": { "s": { "kind": "ti-orbit", "seed": "0,4,7" } },
        "nodes": {
            "a": { "system": "s", "segment": "0,4,7" },
            "b": { "system": "s", "segment": "1,5,8" }
        },
        "edges": [ { "from": "a", "to": "b", "op": "Q2" } ]
    }"#;
    let path = dir.path().join("bad.json");
    std::fs::write(&path, doc).unwrap();
    let out = gis(
        &["check-network", path.to_str().unwrap(), "--format", "json"],
        dir.path(),
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(value["pass"], false);
    assert_eq!(value["edges"][0]["computed"], "2,6,9");
}

#[test]
fn morphism_text_matches_the_documented_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = gis(
        &["morphism", "--from-seed", "0,4,7", "--map", "aff(10,0)"],
        dir.path(),
        &[],
    );
    assert!(stdout_of(&out).contains("morphism: valid; monic: no; epic: no; iso: no"));
    let out = gis(
        &["morphism", "--from-seed", "0,4,7", "--map", "M7"],
        dir.path(),
        &[],
    );
    assert!(stdout_of(&out).contains("morphism: valid; monic: yes; epic: yes; iso: yes"));
}

#[test]
fn export_dot_matches_the_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = gis(&["fixtures"], dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    let dot_path = dir.path().join("summary.dot");
    let out = gis(
        &[
            "export-dot",
            "schoenberg_summary.json",
            "-o",
            dot_path.to_str().unwrap(),
        ],
        dir.path(),
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let produced = std::fs::read_to_string(&dot_path).unwrap();
    let golden = include_str!("golden/schoenberg_summary.dot");
    assert_eq!(produced, golden, "DOT output drifted from the golden file");
    assert_eq!(produced.matches("subgraph cluster_").count(), 6);
}

#[test]
fn subdual_with_contextual_generators() {
    let dir = tempfile::tempdir().unwrap();
    let out = gis(
        &[
            "subdual", "--seed", "0,4,7", "--gens", "P,R", "--base", "0,4,7",
        ],
        dir.path(),
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("generators (contextual side): P, R"));
    assert!(text.contains("S0: 8 segments"));
    // Mixed-side generators are a domain error.
    let out = gis(
        &["subdual", "--seed", "0,4,7", "--gens", "P,T3"],
        dir.path(),
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
}
