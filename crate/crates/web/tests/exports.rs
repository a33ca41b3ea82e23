use ipslq_web::{diagonal_trajectory, find_relation, radical_sum, reconstruct_minpoly};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).expect("exports always return JSON")
}

#[test]
fn relation_round_trip() {
    let v = parse(find_relation("1, 2", "3", 30, false));
    assert_eq!(v["outcome"], "relation");
    let m: Vec<i64> = v["relation"].as_array().unwrap().iter().map(|c| c.as_str().unwrap().parse().unwrap()).collect();
    assert_eq!(m[0] + 2 * m[1], 0);
    assert_eq!(parse(find_relation("1 2", "3", 30, true))["algorithm"], "pslq");
}

#[test]
fn errors_are_json() {
    for s in [
        find_relation("1,abc", "3", 30, false),
        find_relation("1,2", "-1", 30, false),
        find_relation("1,2", "3", 5000, false),
        reconstruct_minpoly("x", 3, 5, 30),
        radical_sum(0, 2, 30),
    ] {
        assert!(parse(s)["error"].is_string());
    }
}

#[test]
fn minpoly_from_radical_sum() {
    let alpha = parse(radical_sum(2, 2, 80));
    let alpha = alpha.as_str().unwrap();
    assert!(alpha.starts_with("3.14626436994197234232913506571557"));
    let v = parse(reconstruct_minpoly(alpha, 5, 11, 80));
    assert_eq!(v["outcome"], "polynomial");
    assert_eq!(v["polynomial"], "y^4 - 10*y^2 + 1");
    assert_eq!(v["height"], "10");
}

#[test]
fn trajectory_has_one_step_per_iteration() {
    let powers = "1,1.4142135623730950488016887242096980785696718753769,2";
    let v = parse(diagonal_trajectory(powers, "5", 50, false));
    assert_eq!(v["outcome"], "relation");
    let steps = v["steps"].as_array().unwrap();
    assert_eq!(steps.len() as u64, v["iterations"].as_u64().unwrap());
    for s in steps {
        assert_eq!(s["log10_diag"].as_array().unwrap().len(), 2);
    }
    // the incremental run starts on the last column and widens to the first
    assert_eq!(steps[0]["window_start"], 1);
    assert_eq!(steps.last().unwrap()["window_start"], 0);
}
