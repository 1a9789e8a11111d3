use chipsplit_wasm_demo::{compare_json, decision_json, positions_json};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn compare_three_players() {
    let v = parse(compare_json("1000, 500, 100", "100,50,0"));
    let diff: Vec<String> = v["percent_diff"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| format!("{:+.1}", d.as_f64().unwrap()))
        .collect();
    assert_eq!(diff, ["+2.5", "+4.0", "-33.7"]);
}

#[test]
fn positions_rows_sum_to_one() {
    let v = parse(positions_json("1000,500,100", "dcm"));
    for s in v["row_sums"].as_array().unwrap() {
        assert!((s.as_f64().unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn decision_reports_both_models() {
    let v = parse(decision_json("50,30,20", 2, "1200,800,2000,3000", "0,2000,2000,3000", "2000,0,2000,3000", 0.4));
    assert_eq!(v["icm"]["recommendation"], "fold");
    assert_eq!(v["dcm"]["recommendation"], "call");
}

#[test]
fn errors_are_json() {
    let v = parse(compare_json("0,5", "100"));
    assert_eq!(v["error"]["code"], "validation_error");
    let v = parse(compare_json("abc", "100"));
    assert!(v["error"]["message"].as_str().unwrap().contains("abc"));
}
