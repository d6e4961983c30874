//! End-to-end pipeline checks at moderate orders (the full-depth dP3 run is
//! part of the acceptance target).

use scatter_core::fixtures;
use scatter_core::jacobian;
use scatter_core::pipeline;
use scatter_core::poly::Poly;
use scatter_core::relations::unit_fibre;

fn unit_fibre_rank(name: &str, order: i64) -> Option<usize> {
    let f = fixtures::get(name).unwrap();
    let (c, rels) = pipeline::fixture_relations(&f, order).unwrap();
    let n = c.len();
    let (v, eqs) = unit_fibre(&rels, n);
    let w = Poly::parse(&v, &v.join(" + ")).unwrap();
    jacobian::critical_ideal_codim(&v, &eqs, &w, n - 2).unwrap().quotient_dimension().unwrap()
}

#[test]
fn jacobian_rank_is_twelve_minus_degree() {
    assert_eq!(unit_fibre_rank("dP5", 3), Some(7));
    assert_eq!(unit_fibre_rank("dP4", 5), Some(8));
}

#[test]
fn dp3_matches_corrected_table_below_order() {
    let order = 9;
    let f = fixtures::get("dP3").unwrap();
    let (c, rels) = pipeline::fixture_relations(&f, order).unwrap();
    assert_eq!(rels.len(), 1);
    let cmp = pipeline::compare_to_table(&c, &rels, order).unwrap().unwrap();
    assert!(cmp.corrected.is_empty(), "{:?}", cmp.corrected);
}

#[test]
fn dp4_and_dp5_match_table() {
    for (name, order, printed_diffs) in [("dP4", 5, 0), ("dP5", 3, 2)] {
        let f = fixtures::get(name).unwrap();
        let (c, rels) = pipeline::fixture_relations(&f, order).unwrap();
        let cmp = pipeline::compare_to_table(&c, &rels, order).unwrap().unwrap();
        assert!(cmp.corrected.is_empty(), "{name}: {:?}", cmp.corrected);
        assert_eq!(cmp.printed.len(), printed_diffs, "{name}: {:?}", cmp.printed);
    }
}

#[test]
fn dp2_engine_agrees_with_fixture_where_reached() {
    let r = pipeline::dp2_engine_check(7).unwrap();
    assert!(r.mismatches.is_empty(), "{:?}", r.mismatches);
    assert!(r.compared > 0);
    assert!(r.fixture_only > 0);
}

#[test]
fn consistent_rejects_bad_order() {
    assert!(pipeline::consistent_fixture("dP5", 0).is_err());
    assert!(pipeline::consistent_fixture("nope", 3).is_err());
}
