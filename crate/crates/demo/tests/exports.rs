use scatter_demo::{broken_lines_json, consistent_json, surfaces, theta_product_json};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn surfaces_listed() {
    let v = parse(surfaces());
    assert!(v.as_array().unwrap().iter().any(|s| s["name"] == "dP5"));
}

#[test]
fn consistent_diagram_for_page() {
    let v = parse(consistent_json("ks-basic", 4).unwrap());
    assert_eq!(v["rays"].as_array().unwrap().len(), 5);
    let v = parse(consistent_json("dP5", 3).unwrap());
    assert_eq!(v["boundary"].as_array().unwrap().len(), 5);
    assert!(consistent_json("dP2", 3).is_err());
    assert!(consistent_json("dP5", 99).is_err());
}

#[test]
fn broken_lines_have_polylines_and_sum_to_expansion() {
    let v = parse(broken_lines_json("dP5", 3, 1, 1, 2).unwrap());
    let lines = v["lines"].as_array().unwrap();
    assert!(!lines.is_empty());
    for l in lines {
        let pts = l["points"].as_array().unwrap();
        assert_eq!(pts.len(), l["bends"].as_array().unwrap().len() + 2);
    }
    assert!(!v["expansion"].as_array().unwrap().is_empty());
    assert!(broken_lines_json("dP5", 3, 9, 1, 2).is_err());
}

#[test]
fn theta_product_symmetric() {
    let a = parse(theta_product_json("dP5", 3, 1, 3).unwrap());
    let b = parse(theta_product_json("dP5", 3, 3, 1).unwrap());
    assert_eq!(a["product"], b["product"]);
}
