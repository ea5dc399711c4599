//! End-to-end checks of the command-line surface: output formats, exit
//! codes, schemas, and determinism across worker counts.

use std::process::Command;

use jetbounds::polyring::IntersectionPolynomial;

fn run(args: &[&str]) -> (String, String, i32) {
    run_with_env(args, &[])
}

fn run_with_env(args: &[&str], env: &[(&str, &str)]) -> (String, String, i32) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_jetbounds"));
    cmd.args(args).env_remove("JETBOUNDS_MAX_TERMS");
    for (key, value) in env {
        cmd.env(key, value);
    }
    let out = cmd.output().expect("failed to spawn jetbounds");
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().unwrap_or(-1),
    )
}

#[test]
fn bound_text_output_for_3_3() {
    let (stdout, _, code) = run(&["bound", "-n", "3", "-k", "3"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("d >= 82"), "stdout: {stdout}");
    assert!(stdout.contains("333162*d^4"));
}

#[test]
fn bound_reports_no_bound_for_2_1() {
    let (stdout, _, code) = run(&["bound", "-n", "2", "-k", "1"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("bound: none"), "stdout: {stdout}");
    assert!(stdout.contains("-4*d^2 - 2*d"));
}

#[test]
fn bound_json_schema() {
    let (stdout, _, code) = run(&["bound", "-n", "2", "-k", "2", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["bound"], 18);
    assert_eq!(v["n"], 2);
    assert_eq!(v["k"], 2);
    assert_eq!(v["N"], 4);
    assert_eq!(v["weights"], serde_json::json!([2, 1]));
    assert_eq!(v["twist"], 6);
    assert!(v["class"].is_string());
    assert!(v["poly_d"].is_array());
    // coefficients are decimal strings
    assert!(v["poly_d"][0][1].is_string());
}

#[test]
fn table_text_rows() {
    let (stdout, _, code) = run(&["table", "--max-n", "2"]);
    assert_eq!(code, 0);
    let row = stdout
        .lines()
        .find(|l| l.trim_start().starts_with('2'))
        .unwrap();
    let cells: Vec<&str> = row.split_whitespace().collect();
    assert_eq!(cells, vec!["2", "-", "18", "16", "16", "16"]);
}

#[test]
fn table_json_round_trips() {
    let (stdout, _, code) = run(&["table", "--max-n", "2", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let again: serde_json::Value = serde_json::from_str(&v.to_string()).unwrap();
    assert_eq!(v, again);
    assert_eq!(v["cells"].as_array().unwrap().len(), 5);
    assert_eq!(v["cells"][0]["bound"], serde_json::Value::Null);
}

#[test]
fn class_matches_bound_class() {
    let (stdout, _, code) = run(&["class", "-n", "3", "-k", "3"]);
    assert_eq!(code, 0);
    let class: IntersectionPolynomial = stdout.trim().parse().unwrap();
    let expected: IntersectionPolynomial =
        "-3421377792*h^3 + 676045440*c1*h^2 - 7494966*c1^3 + 10997352*c2*c1 - 3835548*c3"
            .parse()
            .unwrap();
    assert_eq!(class, expected);
}

#[test]
fn vanishing_reports_clean_case() {
    let (stdout, _, code) = run(&["vanishing", "-n", "4", "-k", "3", "--m", "12", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["all_vanish"], true);
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn vanishing_lists_unguaranteed_components() {
    let (stdout, _, code) = run(&["vanishing", "-n", "2", "-k", "2", "--m", "3", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["all_vanish"], false);
    assert_eq!(v["violations"][0]["component"], "1,1");
    assert_eq!(v["violations"][0]["t"], 2);
}

#[test]
fn vanishing_single_piece() {
    let (stdout, _, code) = run(&["vanishing", "-n", "2", "-k", "1", "--m", "1", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["pieces"], 1);
    assert_eq!(v["all_vanish"], true);
}

#[test]
fn pieri_identity_case() {
    let (stdout, _, code) = run(&["pieri", "1", "--m", "0", "-n", "2"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "1 x (1)\n");
}

#[test]
fn pieri_splits_a_box() {
    let (stdout, _, code) = run(&["pieri", "1", "--m", "1", "-n", "2"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "1 x (1,1)\n1 x (2)\n");
}

#[test]
fn graded_pieces_line() {
    let (stdout, _, code) = run(&["graded", "-k", "2", "--m", "3"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "(3,0) (1,1)\n");
}

#[test]
fn usage_errors_exit_1() {
    let (_, _, code) = run(&["no-such-command"]);
    assert_eq!(code, 1);
    let (_, _, code) = run(&["bound", "-n", "1", "-k", "1"]);
    assert_eq!(code, 1);
    let (_, _, code) = run(&["pieri", "1,2", "--m", "1", "-n", "3"]);
    assert_eq!(code, 1);
    let (_, _, code) = run(&["--help"]);
    assert_eq!(code, 0);
}

#[test]
fn ceiling_exits_2() {
    let (_, stderr, code) = run(&["bound", "-n", "4", "-k", "4", "--max-terms", "10"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("ceiling"), "stderr: {stderr}");
}

#[test]
fn env_ceiling_applies_and_flag_wins() {
    let (_, _, code) = run_with_env(&["bound", "-n", "3", "-k", "3"], &[("JETBOUNDS_MAX_TERMS", "10")]);
    assert_eq!(code, 2);
    let (_, _, code) = run_with_env(
        &["bound", "-n", "3", "-k", "3", "--max-terms", "1000000"],
        &[("JETBOUNDS_MAX_TERMS", "10")],
    );
    assert_eq!(code, 0);
}

#[test]
fn output_is_deterministic_across_worker_counts() {
    let (one, _, c1) = run(&["bound", "-n", "3", "-k", "3", "--parallel", "1"]);
    let (four, _, c4) = run(&["bound", "-n", "3", "-k", "3", "--parallel", "4"]);
    assert_eq!(c1, 0);
    assert_eq!(c4, 0);
    assert_eq!(one, four);

    let (seq, _, _) = run(&["table", "--max-n", "2", "--parallel", "1", "--format", "json"]);
    let (par, _, _) = run(&["table", "--max-n", "2", "--parallel", "3", "--format", "json"]);
    assert_eq!(seq, par);
}
