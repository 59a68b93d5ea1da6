use std::fs;
use std::path::{Path, PathBuf};

use mulesim::io::cli::{main_with_args, EXIT_FAILURE, EXIT_OK, EXIT_TRACE, EXIT_VALIDATION};

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(format!("{name}.json"))
}

fn run(args: &[&str]) -> i32 {
    main_with_args(std::iter::once("mulesim").chain(args.iter().copied()))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// sim_fixed with one field rewritten.
fn patched(dir: &Path, from: &str, to: &str) -> PathBuf {
    let text = fs::read_to_string(scenario("sim_fixed")).unwrap();
    assert!(text.contains(from), "fixture lacks {from}");
    let p = dir.join("patched.json");
    fs::write(&p, text.replacen(from, to, 1)).unwrap();
    p
}

fn trace_csv(dir: &Path, rows: &[&str]) -> PathBuf {
    let p = dir.join("trace.csv");
    let mut text = String::from("t_s,x_m,y_m,alt_m,snr_0,snr_1,snr_2,snr_3\n");
    for r in rows {
        text.push_str(r);
        text.push('\n');
    }
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn run_writes_result_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let code = run(&[
        "run",
        "--scenario",
        s(&scenario("sim_fixed")),
        "--out",
        s(&out),
    ]);
    assert_eq!(code, EXIT_OK);
    for f in ["slots.csv", "summary.json", "cdf_snr.csv"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
}

#[test]
fn compare_writes_both_policies() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("cmp");
    let code = run(&[
        "compare",
        "--scenario",
        s(&scenario("dt_fixed")),
        "--out",
        s(&out),
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.join("greedy/slots.csv").is_file());
    assert!(out.join("hgad/summary.json").is_file());
    let cmp: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("comparison.json")).unwrap()).unwrap();
    assert!(cmp["hgad_over_greedy"].as_f64().unwrap() > 0.0);
}

#[test]
fn policy_override_is_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("g");
    let code = run(&[
        "run",
        "--scenario",
        s(&scenario("sim_fixed")),
        "--policy",
        "greedy",
        "--out",
        s(&out),
    ]);
    assert_eq!(code, EXIT_OK);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["policy"], "greedy");
    assert_eq!(summary["mode"], "fixed_greedy");
}

#[test]
fn invalid_scenario_exits_with_validation_code() {
    let tmp = tempfile::tempdir().unwrap();
    let p = patched(tmp.path(), "\"v_max_mps\": 10.0", "\"v_max_mps\": 0.0");
    assert_eq!(
        run(&["run", "--scenario", s(&p), "--out", s(tmp.path())]),
        EXIT_VALIDATION
    );
}

#[test]
fn waypoint_outside_fence_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let p = patched(tmp.path(), "[850, 150]", "[1850, 150]");
    assert_eq!(
        run(&["run", "--scenario", s(&p), "--out", s(tmp.path())]),
        EXIT_VALIDATION
    );
}

#[test]
fn malformed_json_exits_with_validation_code() {
    let tmp = tempfile::tempdir().unwrap();
    let p = patched(tmp.path(), "\"slot_dt_s\": 1.0", "\"slot_dt_s\": \"one\"");
    assert_eq!(
        run(&["run", "--scenario", s(&p), "--out", s(tmp.path())]),
        EXIT_VALIDATION
    );
}

#[test]
fn unknown_flag_exits_with_validation_code() {
    assert_eq!(run(&["run", "--bogus"]), EXIT_VALIDATION);
}

#[test]
fn missing_scenario_is_a_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("nope.json");
    assert_eq!(
        run(&["run", "--scenario", s(&p), "--out", s(tmp.path())]),
        EXIT_FAILURE
    );
}

#[test]
fn trace_column_mismatch_exits_with_trace_code() {
    let tmp = tempfile::tempdir().unwrap();
    let t = trace_csv(tmp.path(), &["0,50,50,30,1,2,3,4", "1,50,50,30,1,2,3"]);
    let code = run(&[
        "run",
        "--scenario",
        s(&scenario("sim_fixed")),
        "--trace",
        s(&t),
        "--out",
        s(tmp.path()),
    ]);
    assert_eq!(code, EXIT_TRACE);
}

#[test]
fn non_monotone_trace_exits_with_trace_code() {
    let tmp = tempfile::tempdir().unwrap();
    let t = trace_csv(tmp.path(), &["0,50,50,30,1,2,3,4", "0,50,50,30,1,2,3,4"]);
    let code = run(&[
        "run",
        "--scenario",
        s(&scenario("sim_fixed")),
        "--trace",
        s(&t),
        "--out",
        s(tmp.path()),
    ]);
    assert_eq!(code, EXIT_TRACE);
}

#[test]
fn short_trace_truncates_with_trace_code() {
    let tmp = tempfile::tempdir().unwrap();
    let t = trace_csv(tmp.path(), &["0,50,50,30,1,2,3,4", "5,50,50,30,1,2,3,4"]);
    let out = tmp.path().join("o");
    let code = run(&[
        "run",
        "--scenario",
        s(&scenario("sim_fixed")),
        "--trace",
        s(&t),
        "--out",
        s(&out),
    ]);
    assert_eq!(code, EXIT_TRACE);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["truncated"], true);
}

#[test]
fn oracle_subcommand_accepts_header() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("cap.csv");
    fs::write(&p, "s0,s1\n5,3\n5,3\n0,4\n").unwrap();
    assert_eq!(
        run(&["oracle", "--capacities", s(&p), "--quotas", "6,4"]),
        EXIT_OK
    );
}

#[test]
fn oracle_subcommand_rejects_large_problems() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("cap.csv");
    fs::write(&p, "1\n".repeat(13)).unwrap();
    assert_ne!(
        run(&["oracle", "--capacities", s(&p), "--quotas", "5"]),
        EXIT_OK
    );
}
