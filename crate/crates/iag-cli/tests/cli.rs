//! End-to-end tests of the `iag` binary: exit codes, output formats,
//! and that emitted artifacts round-trip through the library.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use iag::{builtin_cpag, replay, EngineConfig};

fn iag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iag"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("iag-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn derive_reaches_a_terminal_form() {
    let out = iag(&[
        "derive", "--builtin", "cpag", "--window", "3x3", "--seed", "7",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stderr(&out).contains("reason: terminal form"));
    let body = stdout(&out);
    assert_eq!(body.lines().count(), 3);
    assert!(!body.contains('S') && !body.contains('A'));
}

#[test]
fn derive_dead_ends_on_a_one_cell_window() {
    let out = iag(&["derive", "--builtin", "cpag", "--window", "1x1"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("no applicable rule"));
    assert_eq!(stdout(&out), "S\n");
}

#[test]
fn derive_rejects_out_of_bounds_start() {
    let out = iag(&[
        "derive", "--builtin", "cpag", "--window", "3x3", "--start", "5,5",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("start"));
}

#[test]
fn derive_trace_file_replays_in_the_library() {
    let path = scratch("derive.trace");
    let out = iag(&[
        "derive",
        "--builtin",
        "cpag",
        "--window",
        "3x3",
        "--seed",
        "7",
        "--trace",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let trace = iag::parse_trace(&fs::read_to_string(&path).unwrap()).unwrap();
    let replayed = replay(&builtin_cpag(), &trace, &EngineConfig::default()).unwrap();
    assert_eq!(replayed.to_string(), stdout(&out));
}

#[test]
fn check_finds_a_witness_for_the_center_grain() {
    let path = scratch("center.pattern");
    fs::write(&path, "000\n010\n000\n").unwrap();
    let out = iag(&["check", "--builtin", "cpag", "--pattern", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let body = stdout(&out);
    assert!(body.starts_with("derivable\n"));
    let trace = iag::parse_trace(body.strip_prefix("derivable\n").unwrap()).unwrap();
    let replayed = replay(&builtin_cpag(), &trace, &EngineConfig::default()).unwrap();
    assert_eq!(replayed.to_string(), "b b b\nb a b\nb b b\n");
}

#[test]
fn check_rejects_a_split_support_target() {
    let path = scratch("split.grid");
    fs::write(&path, "a # a\n").unwrap();
    let out = iag(&["check", "--builtin", "cpag", "--pattern", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout(&out), "not derivable\n");
}

#[test]
fn check_caps_out_as_inconclusive() {
    let path = scratch("capped.pattern");
    fs::write(&path, "000\n010\n000\n").unwrap();
    let out = iag(&[
        "check", "--builtin", "cpag",
        "--pattern", path.to_str().unwrap(),
        "--budget", "5",
    ]);
    assert_eq!(code(&out), 4);
    assert!(stdout(&out).starts_with("inconclusive"));
}

#[test]
fn check_rejects_a_zero_budget() {
    let path = scratch("zero.pattern");
    fs::write(&path, "1\n").unwrap();
    let out = iag(&[
        "check", "--builtin", "cpag",
        "--pattern", path.to_str().unwrap(),
        "--budget", "0",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn check_rejects_nonterminal_targets() {
    let path = scratch("nonterminal.grid");
    fs::write(&path, "a S\n").unwrap();
    let out = iag(&["check", "--builtin", "cpag", "--pattern", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("nonterminal"));
}

#[test]
fn census_reports_the_known_counts() {
    for (args, expect) in [
        (vec!["--center-fixed", "--grains", "2"], "count: 8"),
        (vec!["--center-fixed", "--grains", "3"], "count: 28"),
        (
            vec!["--center-fixed", "--grains", "2", "--connectivity", "4"],
            "count: 4",
        ),
    ] {
        let mut full = vec!["census", "--window", "3x3"];
        full.extend(args);
        let out = iag(&full);
        assert_eq!(code(&out), 0);
        assert!(stdout(&out).contains(expect), "{}", stdout(&out));
    }
}

#[test]
fn census_json_and_listing() {
    let out = iag(&[
        "census", "--window", "3x3", "--center-fixed", "--grains", "2",
        "--format", "json",
    ]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["count"], 8);
    assert_eq!(v["window"], "3x3");

    let out = iag(&[
        "census", "--window", "3x3", "--center-fixed", "--grains", "2", "--list",
    ]);
    let body = stdout(&out);
    assert_eq!(body.matches("key ").count(), 8);
    // Every listed pattern has the center bit set.
    for block in body.split("key ").skip(1) {
        let rows: Vec<&str> = block.lines().skip(1).take(3).collect();
        assert_eq!(rows[1].as_bytes()[1], b'1');
    }
}

#[test]
fn census_refuses_oversized_windows() {
    let out = iag(&["census", "--window", "6x6"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn enumerate_small_window() {
    let out = iag(&[
        "enumerate", "--builtin", "cpag", "--window", "1x2", "--format", "json",
    ]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["derivable_count"], 4);
    assert_eq!(v["search_exhausted"], true);
}

#[test]
fn enumerate_capped_search_is_inconclusive() {
    let out = iag(&[
        "enumerate", "--builtin", "cpag", "--window", "3x3", "--cap", "10",
    ]);
    assert_eq!(code(&out), 4);
    assert!(stdout(&out).contains("search_exhausted: false"));

    let out = iag(&[
        "enumerate", "--builtin", "cpag", "--window", "3x3", "--cap", "0",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn enumerate_coverage_prints_both_discrepancy_lists() {
    let out = iag(&[
        "enumerate", "--builtin", "cpag", "--window", "2x2", "--coverage",
    ]);
    assert_eq!(code(&out), 0);
    let body = stdout(&out);
    assert!(body.contains("derivable_not_connected:"));
    assert!(body.contains("connected_not_derivable:"));
    assert!(body.contains("note:"));
}

#[test]
fn enumerate_rule_free_grammar_derives_nothing() {
    let path = scratch("empty.iag");
    fs::write(
        &path,
        "@grammar empty\n@nonterminals S\n@terminals a b\n@start S\n",
    )
    .unwrap();
    let out = iag(&["enumerate", path.to_str().unwrap(), "--window", "1x2"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("derivable_count: 0"));
    assert!(stderr(&out).contains("no rules"));
}

#[test]
fn validate_accepts_the_shipped_grammar_file() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../grammars/cpag.iag");
    let out = iag(&["validate", path, "--classify"]);
    assert_eq!(code(&out), 0);
    let body = stdout(&out);
    assert!(body.contains("R1a: ok, context-free"));
    assert!(body.contains("grammar: context-free"));
}

#[test]
fn validate_names_a_terminal_rewriting_rule() {
    let path = scratch("bad_c3.iag");
    fs::write(
        &path,
        "@grammar bad\n@nonterminals S\n@terminals a b\n@start S\n\
         @rule RX\nS a\n=>\nb b\n@end\n",
    )
    .unwrap();
    let out = iag(&["validate", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let body = stdout(&out);
    assert!(body.contains("RX"), "{body}");
    assert!(body.contains("C3"), "{body}");
}

#[test]
fn validate_rejects_shape_mismatch_at_parse_time() {
    let path = scratch("bad_c1.iag");
    fs::write(
        &path,
        "@grammar bad\n@nonterminals S\n@terminals a\n@start S\n\
         @rule RY\nS #\n=>\na\n@end\n",
    )
    .unwrap();
    let out = iag(&["validate", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("RY") || stderr(&out).contains("shape"));
}

#[test]
fn render_key_as_ascii_and_pbm() {
    let out = iag(&["render", "--key", "80", "--window", "3x3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "001\n010\n000\n");

    let out = iag(&["render", "--key", "80", "--window", "3x3", "--format", "pbm"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "P1\n3 3\n0 0 1\n0 1 0\n0 0 0\n");

    let out = iag(&["render", "--key", "512", "--window", "3x3"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn render_pattern_file_to_output_file() {
    let input = scratch("render_in.pattern");
    fs::write(&input, "ab\nba\n").unwrap();
    let output = scratch("render_out.pbm");
    let out = iag(&[
        "render",
        "--pattern", input.to_str().unwrap(),
        "--format", "pbm",
        "--out", output.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read_to_string(&output).unwrap(), "P1\n2 2\n1 0\n0 1\n");
}
