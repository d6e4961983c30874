//! Randomized property suites for the series ring, wall crossing, diagram
//! completion, theta products and the Gröbner kernel.

use proptest::prelude::*;
use scatter_core::base::{det, primitive, V2};
use scatter_core::broken::{Endpoint, ThetaEngine};
use scatter_core::jacobian::{groebner_basis, truncated_quotient_dimension, Ideal};
use scatter_core::pipeline;
use scatter_core::poly::{vars, Poly};
use scatter_core::relations::Expansion;
use scatter_core::scatter::ScatteringDiagram;
use scatter_core::series::{q, Exponent, Grading, Series};
use scatter_core::{base::DualComplex, fixtures};
use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

const ORDER: i64 = 5;

fn grading() -> Arc<Grading> {
    static G: OnceLock<Arc<Grading>> = OnceLock::new();
    G.get_or_init(|| Grading::new("test", vec![1, 1])).clone()
}

fn series_strategy(unit_constant: bool) -> impl Strategy<Value = Series> {
    prop::collection::vec(((-2i64..=2, -2i64..=2), (0i64..=3, 0i64..=3), -3i64..=3), 0..6).prop_map(move |ts| {
        let g = grading();
        let mut s = if unit_constant { Series::one(&g, ORDER) } else { Series::zero(&g, ORDER) };
        for ((a, b), (c1, c2), k) in ts {
            if unit_constant && c1 + c2 == 0 {
                continue;
            }
            s.add_term(Exponent::new([a, b], vec![c1, c2]), q(k));
        }
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in series_strategy(false), b in series_strategy(false), c in series_strategy(false)) {
        let one = Series::one(&grading(), ORDER);
        prop_assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b.add(&c).unwrap()).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&one).unwrap(), a.clone());
        prop_assert!(a.sub(&a).unwrap().is_empty());
    }

    #[test]
    fn inverse_and_powers(f in series_strategy(true)) {
        let one = Series::one(&grading(), ORDER);
        let inv = f.inverse().unwrap();
        prop_assert_eq!(f.mul(&inv).unwrap(), one);
        prop_assert_eq!(f.pow(3).unwrap(), f.mul(&f).unwrap().mul(&f).unwrap());
        prop_assert_eq!(f.pow(-2).unwrap(), inv.mul(&inv).unwrap());
        prop_assert_eq!(f.log().unwrap().exp().unwrap(), f);
    }
}

fn primitive_dir() -> impl Strategy<Value = V2> {
    (-2i64..=2, -2i64..=2).prop_filter("nonzero", |(a, b)| *a != 0 || *b != 0).prop_map(|(a, b)| primitive([a, b]))
}

/// Two or three incoming binomial walls in pairwise distinct directions.
fn diagram_strategy() -> impl Strategy<Value = ScatteringDiagram> {
    prop::collection::vec((primitive_dir(), 1i64..=2), 2..=3)
        .prop_filter("distinct directions", |ws| {
            ws.iter().enumerate().all(|(i, a)| ws[..i].iter().all(|b| a.0 != b.0))
        })
        .prop_map(|ws| {
            let n = ws.len();
            let g = Grading::new("test", vec![1; n]);
            let labels = (1..=n).map(|i| format!("t{i}")).collect();
            let mut d = ScatteringDiagram::empty(g, 4, labels);
            for (i, (v, c)) in ws.into_iter().enumerate() {
                let mut cls = vec![0; n];
                cls[i] = 1;
                d.add_binomial(v, Exponent::new(v, cls), q(c)).unwrap();
            }
            d
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cross_wall_is_a_multiplicative_involution_pair(d in diagram_strategy(), p in (-2i64..=2, -2i64..=2), r in (-2i64..=2, -2i64..=2)) {
        let ray = d.rays.values().next().unwrap();
        let rank = d.rank();
        let tangent = [-ray.dir[1], ray.dir[0]];
        let e1 = Exponent::new([p.0, p.1], vec![0; rank]);
        let e2 = Exponent::new([r.0, r.1], vec![0; rank]);
        let a = d.cross_wall(ray, &e1, &q(1), tangent).unwrap();
        let b = d.cross_wall(ray, &e2, &q(1), tangent).unwrap();
        let ab = d.cross_wall(ray, &e1.add(&e2), &q(1), tangent).unwrap();
        prop_assert_eq!(a.mul(&b).unwrap(), ab);
        let back = d.cross_wall_series(ray, &a, [-tangent[0], -tangent[1]]).unwrap();
        prop_assert_eq!(back, Series::monomial(&d.grading, d.order, e1, q(1)));
    }

    #[test]
    fn completion_is_idempotent_and_order_stable(d in diagram_strategy()) {
        let c4 = d.make_consistent(4).unwrap();
        let again = c4.make_consistent(4).unwrap();
        prop_assert_eq!(again.to_json(), c4.to_json());
        let c3 = d.truncated(3).make_consistent(3).unwrap();
        prop_assert_eq!(c4.truncated(3).to_json()["rays"].clone(), c3.to_json()["rays"].clone());
        prop_assert!(c4.loop_automorphism(c4.pick_start()).unwrap().is_identity());
    }
}

struct Dp5 {
    engine: ThetaEngine,
}

fn dp5() -> &'static Dp5 {
    static E: OnceLock<Dp5> = OnceLock::new();
    E.get_or_init(|| {
        let c: DualComplex = fixtures::get("dP5").unwrap().complex().unwrap();
        let d = pipeline::consistent(&c, 8).unwrap();
        Dp5 { engine: pipeline::engine(&c, d).unwrap() }
    })
}

fn small_point() -> impl Strategy<Value = V2> {
    (-1i64..=1, -1i64..=1).prop_filter("nonzero", |(a, b)| *a != 0 || *b != 0).prop_map(|(a, b)| [a, b])
}

fn unit_expansion(rank: usize) -> Expansion {
    BTreeMap::from([([0, 0], BTreeMap::from([(vec![0; rank], q(1))]))])
}

const GENERIC: [V2; 4] = [[2, 7], [-3, 1], [1, -4], [5, 2]];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn theta_products_commute_and_are_positive(p in small_point(), r in small_point()) {
        let e = &dp5().engine;
        let a = e.product(p, r).unwrap();
        prop_assert_eq!(&a, &e.product(r, p).unwrap());
        for coeffs in a.values() {
            for c in coeffs.values() {
                prop_assert!(*c > q(0));
            }
        }
    }

    #[test]
    fn theta_products_are_endpoint_independent(p in small_point(), r in small_point(), i in 0usize..4, j in 0usize..4) {
        let e = &dp5().engine;
        let (u1, u2) = (GENERIC[i], GENERIC[j]);
        prop_assume!(det(u1, u2) != 0);
        let a = e.product(p, r).unwrap();
        let b = e.product_with(p, r, |x| Endpoint::with_perturbation(x, u1, u2)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn dp5_theta_algebra_is_associative(p in small_point(), r in small_point(), s in small_point()) {
        let e = &dp5().engine;
        let rank = e.grading().rank();
        let one = unit_expansion(rank);
        let left = e.multiply(&e.multiply(&e.multiply(&one, p).unwrap(), r).unwrap(), s).unwrap();
        let right = e.multiply(&e.multiply(&e.multiply(&one, r).unwrap(), s).unwrap(), p).unwrap();
        prop_assert_eq!(left, right);
    }
}

/// Zero-dimensional ideal ⟨x^a + f, y^b + g⟩ with deg f < a, deg g < b.
fn ideal_strategy() -> impl Strategy<Value = (u32, u32, Vec<i64>, Vec<i64>)> {
    (1u32..=3, 1u32..=3, prop::collection::vec(-2i64..=2, 6), prop::collection::vec(-2i64..=2, 6))
}

fn lower_terms(v: &Arc<Vec<String>>, deg: u32, cs: &[i64]) -> Poly {
    let monos = ["1", "x", "y", "x*y", "x^2", "y^2"];
    let degs = [0, 1, 1, 2, 2, 2];
    let mut p = Poly::zero(v);
    for ((m, d), c) in monos.iter().zip(degs).zip(cs) {
        if d < deg {
            p = p.add(&Poly::parse(v, m).unwrap().scale(&q(*c)));
        }
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn groebner_properties((a, b, f, g) in ideal_strategy()) {
        let v = vars(&["x", "y"]);
        let g1 = Poly::parse(&v, &format!("x^{a}")).unwrap().add(&lower_terms(&v, a, &f));
        let g2 = Poly::parse(&v, &format!("y^{b}")).unwrap().add(&lower_terms(&v, b, &g));
        let gens = vec![g1.clone(), g2.clone()];
        let basis = groebner_basis(&v, &gens).unwrap();
        prop_assert_eq!(&groebner_basis(&v, &basis).unwrap(), &basis);
        let mut ideal = Ideal::new(&v, gens.clone()).unwrap();
        for p in &gens {
            prop_assert!(ideal.normal_form(p).unwrap().is_zero());
        }
        let dim = ideal.quotient_dimension().unwrap();
        prop_assert_eq!(dim, Some((a * b) as usize));
        prop_assert_eq!(truncated_quotient_dimension(&ideal, (a + b + 2) as i32), (a * b) as usize);
        // Invertible linear change of variables x -> x + 2y.
        let sub = Poly::parse(&v, "x + 2*y").unwrap();
        let moved: Vec<Poly> = gens.iter().map(|p| p.subs_name("x", &sub).unwrap()).collect();
        let mut moved = Ideal::new(&v, moved).unwrap();
        prop_assert_eq!(moved.quotient_dimension().unwrap(), dim);
    }
}
