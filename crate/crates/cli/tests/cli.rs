//! End-to-end checks of the binary: exit-code contract, report
//! determinism, and file handling.

use std::path::Path;
use std::process::{Command, Output};

fn gnncheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gnncheck"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn corpus_list_names_every_construction() {
    let out = gnncheck(&["corpus", "list"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for name in [
        "fig1_triangles_vs_hexagon",
        "fig2_alternate_ports",
        "fig3_s4s4_vs_s8",
        "fig3_conjoint_vs_squares",
        "appendix_4clique",
        "fig4_cubes",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn emit_then_props_matches_the_manifest() {
    let dir = tempdir("emit_props");
    let out = gnncheck(&["corpus", "emit", "fig3_s4s8", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success());
    for file in ["graph_a.json", "graph_b.json", "graph_a.dot", "graph_b.dot", "manifest.json"] {
        assert!(dir.join(file).exists(), "missing {file}");
    }
    let props = gnncheck(&["props", dir.join("graph_a.json").to_str().unwrap()]);
    assert!(props.status.success());
    let text = stdout(&props);
    assert!(text.contains("girth = 4"));
    assert!(text.contains("diameter = inf"));
    assert!(text.contains("cycle_count = 2"));
    let props_b = gnncheck(&["props", dir.join("graph_b.json").to_str().unwrap()]);
    assert!(stdout(&props_b).contains("girth = 8"));
}

#[test]
fn isocheck_prints_a_witness() {
    let dir = tempdir("isocheck");
    gnncheck(&["corpus", "emit", "fig2", "--out", dir.to_str().unwrap()]);
    let out = gnncheck(&[
        "isocheck",
        dir.join("graph_a.json").to_str().unwrap(),
        dir.join("graph_b.json").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("indistinguishable"));
    assert!(text.contains("witness bijection"));
}

#[test]
fn missing_spec_file_exits_one_with_a_diagnostic() {
    let out = gnncheck(&["bounds", "--spec", "/nonexistent/missing.cfg"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn usage_errors_exit_one() {
    let out = gnncheck(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));
    let out = gnncheck(&["reproduce"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verdict_mismatch_exits_two() {
    // an absurd tolerance forces "indistinguishable" on a pair expected
    // to separate
    let out = gnncheck(&[
        "distinguish",
        "--pair",
        "fig3_s4s8",
        "--model",
        "dime",
        "--trials",
        "5",
        "--tol",
        "1e9",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn expected_verdict_exits_zero() {
    let out = gnncheck(&[
        "distinguish", "--pair", "fig2", "--model", "cpn", "--trials", "10",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("verdict = indistinguishable"));
}

#[test]
fn reports_are_byte_identical_for_identical_config() {
    let args = [
        "distinguish", "--pair", "fig1", "--model", "cpn", "--trials", "15", "--seed", "7",
        "--json",
    ];
    let a = gnncheck(&args);
    let b = gnncheck(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn embed_prints_readout_and_probability() {
    let dir = tempdir("embed");
    gnncheck(&["corpus", "emit", "fig1", "--out", dir.to_str().unwrap()]);
    let out = gnncheck(&[
        "embed",
        dir.join("graph_b.json").to_str().unwrap(),
        "--model",
        "lu",
        "--layers",
        "2",
        "--dim",
        "8",
        "--seed",
        "3",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("readout = ["));
    assert!(text.contains("f(G) = "));
}

#[test]
fn reproduce_all_writes_artifacts_and_exits_zero() {
    let dir = tempdir("reproduce");
    let out = gnncheck(&[
        "reproduce",
        "--all",
        "--trials",
        "5",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("ALL PASS"));
    assert!(dir.join("reproduce.txt").exists());
    assert!(dir.join("reproduce.json").exists());
}

#[test]
fn portagg_selftest_reports_the_code_count() {
    let out = gnncheck(&["portagg", "selftest", "--alphabet", "3", "--ports", "3"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("64 distinct codes"));
}

#[test]
fn bounds_verify_exits_zero_when_clean() {
    let out = gnncheck(&[
        "bounds", "verify", "--trials", "50", "--seed", "1", "--depth", "3", "--branch", "2",
        "--dim", "4",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("violations = 0"));
}

fn tempdir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("gnncheck_cli_{tag}_{}", std::process::id()));
    if Path::new(&dir).exists() {
        std::fs::remove_dir_all(&dir).ok();
    }
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
