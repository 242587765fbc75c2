use qdc_wasm::{ellipticity_json, qholo_json, table_json};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn table_for_h1() {
    let v = parse(&table_json(1).unwrap());
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[1], serde_json::json!({"k": 1, "r": 1, "epsilon": 2, "dim": 4}));
    assert!(table_json(0).is_err());
}

#[test]
fn ellipticity_verdicts_match() {
    let v = parse(&ellipticity_json(2, "").unwrap());
    assert_eq!(v["all_match"], true);
    let v = parse(&ellipticity_json(1, "1, 1/2, 0, -3").unwrap());
    assert_eq!(v["all_match"], true);
    assert!(ellipticity_json(1, "1,0").is_err());
    assert!(ellipticity_json(1, "0,0,0,0").is_err());
    assert!(ellipticity_json(1, "a,0,0,0").is_err());
    assert!(ellipticity_json(4, "").is_err());
}

#[test]
fn qholo_verdicts() {
    let constant = r#"{"n":1,"components":[[{"exps":[0,0,0,0],"c":"3"}],[],[],[]]}"#;
    assert_eq!(parse(&qholo_json(constant).unwrap())["q_holomorphic"], true);
    let x0 = r#"{"n":1,"components":[[{"exps":[1,0,0,0],"c":"1"}],[],[],[]]}"#;
    let v = parse(&qholo_json(x0).unwrap());
    assert_eq!(v["q_holomorphic"], false);
    assert!(!v["residual"]["terms"].as_array().unwrap().is_empty());
    assert!(qholo_json("{").is_err());
}
