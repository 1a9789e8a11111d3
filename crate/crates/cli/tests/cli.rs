use std::process::{Command, Output};

use serde_json::Value;

fn chipsplit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chipsplit"))
        .args(args)
        .env_remove("CHIPSPLIT_PORT")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = chipsplit(&all);
    assert!(out.status.success(), "{}", stderr(&out));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn numbers(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

const THREE: [&str; 4] = ["--stacks", "1000,500,100", "--prizes", "100,50,0"];

#[test]
fn compare_table_shows_percent_differences() {
    let mut args = vec!["compare"];
    args.extend(THREE);
    let out = chipsplit(&args);
    assert!(out.status.success());
    let text = stdout(&out);
    let diff_row = text.lines().find(|l| l.starts_with("dcm vs icm")).unwrap();
    let cells: Vec<&str> = diff_row.split_whitespace().skip(3).collect();
    assert_eq!(cells, ["+2.5%", "+4.0%", "-33.7%"]);
    assert!(text.contains("80.79") && text.contains("78.79"));
}

#[test]
fn icm_heads_up_json() {
    let v = json(&["icm", "--stacks", "1000,500", "--prizes", "100"]);
    let eq = numbers(&v["equity"]);
    assert!((eq[0] - 66.67).abs() < 0.005 && (eq[1] - 33.33).abs() < 0.005);
    for key in ["explored_mass", "nodes_visited", "pruned_nodes", "elapsed_ms"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn zero_stack_is_a_validation_error() {
    let out = chipsplit(&["dcm", "--stacks", "0,5", "--prizes", "100"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr(&out);
    assert!(msg.contains("--stacks") && msg.contains("positive"), "{msg}");
}

#[test]
fn malformed_numbers_name_the_flag() {
    let out = chipsplit(&["icm", "--stacks", "10,x", "--prizes", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--stacks: 'x'"));
    let out = chipsplit(&["icm", "--stacks", "10,5", "--prizes", "1,5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--prizes"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(chipsplit(&["dcm", "--stacks", "1"]).status.code(), Some(1));
    assert_eq!(chipsplit(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(chipsplit(&["--help"]).status.code(), Some(0));
}

#[test]
fn resource_errors_exit_three() {
    let out = chipsplit(&["oracle", "--stacks", "97,89,83,79", "--prizes", "1", "--state-budget", "10"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn json_round_trips_byte_for_byte() {
    let mut args = vec!["compare", "--format", "json"];
    args.extend(THREE);
    let raw = stdout(&chipsplit(&args));
    let v: Value = serde_json::from_str(&raw).unwrap();
    let mut again = serde_json::to_string_pretty(&v).unwrap();
    again.push('\n');
    assert_eq!(again, raw);
}

#[test]
fn table_and_json_agree_after_rounding() {
    let mut args = vec!["dcm"];
    args.extend(THREE);
    let text = stdout(&chipsplit(&args));
    let v = json(&args);
    for (i, e) in numbers(&v["equity"]).iter().enumerate() {
        let row = text.lines().find(|l| l.starts_with(&format!("player {} ", i + 1))).unwrap();
        assert!(row.split_whitespace().any(|c| c == format!("{e:.2}")), "{row}");
    }
    assert!(text.contains(&format!("{} nodes", v["nodes_visited"])));
}

#[test]
fn positions_rows_are_percentages() {
    let v = json(&["positions", "--stacks", "1000,500,100"]);
    let first: Vec<f64> = v["positions"].as_array().unwrap().iter().map(|p| 100.0 * p[0].as_f64().unwrap()).collect();
    for (a, e) in first.iter().zip([62.5, 31.25, 6.25]) {
        assert!((a - e).abs() < 0.02);
    }
}

#[test]
fn decide_both_models() {
    let args = [
        "decide", "--prizes", "50,30,20", "--hero", "2",
        "--fold-stacks", "1200,800,2000,3000",
        "--win-stacks", "0,2000,2000,3000",
        "--lose-stacks", "2000,0,2000,3000",
        "--equity", "0.40",
    ];
    let v = json(&args);
    assert_eq!(v["icm"]["recommendation"], "fold");
    assert_eq!(v["dcm"]["recommendation"], "call");
    assert!((v["dcm"]["threshold"].as_f64().unwrap() - 0.312).abs() < 0.005);
    let text = stdout(&chipsplit(&args));
    assert!(text.contains("12.74") && text.contains("9.57"));

    let out = chipsplit(&[&args[..11], &["--equity", "1.5"]].concat());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracle_agrees_with_tree() {
    let mut args = vec!["oracle", "--exact-oracle"];
    args.extend(THREE);
    let v = json(&args);
    assert_eq!(v["method"], "exact");
    assert!(v["max_abs_diff"].as_f64().unwrap() < 1e-9);
    assert_eq!(v["exact_equity"].as_array().unwrap().len(), 3);
}

#[test]
fn parallel_matches_deterministic() {
    let stacks = ["--stacks", "5000,4000,3000,2000,1000", "--prizes", "50,30,20"];
    let serial = json(&[&["dcm"], &stacks[..]].concat());
    let parallel = json(&[&["dcm", "--parallel"], &stacks[..]].concat());
    assert_eq!(serial["nodes_visited"], parallel["nodes_visited"]);
    for (a, b) in numbers(&serial["equity"]).iter().zip(numbers(&parallel["equity"])) {
        assert!((a - b).abs() < 1e-9);
    }
}
