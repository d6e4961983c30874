//! End-to-end compositions used by the command line, the demo and the
//! acceptance checks: fixture → consistent diagram → theta relations.

use std::collections::BTreeMap;

use crate::base::{DualComplex, EFunction, PlFunction, V2};
use crate::broken::{poly_add_term, ClassPoly, ThetaEngine};
use crate::error::{Error, Result};
use crate::fixtures::{self, Fixture};
use crate::lattice::CurveClass;
use crate::relations::{reference_relations, reference_rows, relation_diff, truncate_relation, Presentation, Relation};
use crate::scatter::{self, ScatteringDiagram};

/// Initial diagram of a flattened complex, completed to `order`.
pub fn consistent(c: &DualComplex, order: i64) -> Result<ScatteringDiagram> {
    if order < 1 {
        return Err(Error::Usage(format!("order must be at least 1, got {order}")));
    }
    scatter::initial_diagram(c, order)?.make_consistent(order)
}

/// Consistent diagram of a named fixture (including `ks-basic`).
pub fn consistent_fixture(name: &str, order: i64) -> Result<ScatteringDiagram> {
    if order < 1 {
        return Err(Error::Usage(format!("order must be at least 1, got {order}")));
    }
    if name == fixtures::KS_BASIC {
        return scatter::ks_basic(order).make_consistent(order);
    }
    consistent(&fixtures::get(name)?.complex()?, order)
}

/// Theta engine over a consistent diagram of a flattened complex.
pub fn engine(c: &DualComplex, d: ScatteringDiagram) -> Result<ThetaEngine> {
    ThetaEngine::new(d, PlFunction::for_complex(c)?)
}

pub fn rays(c: &DualComplex) -> Result<Vec<V2>> {
    Ok(c.rays()?.to_vec())
}

/// The presenting relations of the theta algebra.
pub fn relations(c: &DualComplex, e: &ThetaEngine) -> Result<Vec<Relation>> {
    Presentation::new(e, rays(c)?, EFunction::for_complex(c)?).relation_set()
}

/// Relations of a fixture at a given order.
pub fn fixture_relations(f: &Fixture, order: i64) -> Result<(DualComplex, Vec<Relation>)> {
    let c = f.complex()?;
    let d = consistent(&c, order)?;
    let e = engine(&c, d)?;
    let r = relations(&c, &e)?;
    Ok((c, r))
}

/// Differences between computed relations and the reference table, both
/// as printed and with the recorded corrections applied. Reference terms
/// of grade ≥ order are dropped before comparing.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TableComparison {
    pub printed: Vec<String>,
    pub corrected: Vec<String>,
}

pub fn compare_to_table(c: &DualComplex, rels: &[Relation], order: i64) -> Result<Option<TableComparison>> {
    if reference_rows(&c.surface.name, false).is_none() {
        return Ok(None);
    }
    let g = scatter::wall_order_grading(c);
    let labels = &c.surface.labels;
    let mut out = TableComparison::default();
    for (printed, sink) in [(true, &mut out.printed), (false, &mut out.corrected)] {
        let refs = reference_relations(&c.surface, printed)?;
        if refs.len() != rels.len() {
            sink.push(format!("{} computed relations vs {} in the table", rels.len(), refs.len()));
            continue;
        }
        for (a, b) in rels.iter().zip(&refs) {
            let b = truncate_relation(b, &g, order);
            sink.extend(relation_diff(a, &b, labels));
        }
    }
    Ok(Some(out))
}

/// One coefficient compared between the engine and the dP2 fixture.
#[derive(Clone, Debug, PartialEq)]
pub struct Dp2TermCheck {
    pub product: &'static str,
    pub class: CurveClass,
    pub engine: crate::series::Q,
    pub fixture: crate::series::Q,
}

/// Result of recomputing dP2 coefficients with the scattering engine on the
/// blown-up model at a finite order.
#[derive(Clone, Debug, Default)]
pub struct Dp2EngineCheck {
    pub order: i64,
    pub compared: usize,
    pub mismatches: Vec<Dp2TermCheck>,
    /// Fixture terms whose grade is not reached at this order.
    pub fixture_only: usize,
}

/// Compare the constant terms of ϑ_Cϑ_L, ϑ_C² and ϑ_L² with the values the
/// fixture predicts: 3z^{C+L+2E8+2E9} + z^{E8}B_1(E8), 2z^{L+E8+E9}B_1(L)
/// and 2z^{C+E8+E9}B_1(C), all below the given order.
pub fn dp2_engine_check(order: i64) -> Result<Dp2EngineCheck> {
    use crate::dp2::{b_coefficient, Target};
    use crate::lattice::{add, scale};
    use crate::series::q;
    let f = fixtures::get("dP2-blown-up")?;
    let c = f.complex()?;
    let s = &c.surface;
    let r = rays(&c)?;
    let (cl, l, e8, e9) = (s.boundary[2].clone(), s.boundary[0].clone(), s.boundary[1].clone(), s.boundary[3].clone());
    let g = scatter::wall_order_grading(&c);
    let grade = |x: &CurveClass| crate::broken::class_grade(&g, x);
    let e = engine(&c, consistent(&c, order)?)?;
    let shifted = |p: ClassPoly, by: &CurveClass, k: i64| {
        let mut out = ClassPoly::new();
        for (m, a) in p {
            poly_add_term(&mut out, add(&m, by), a * q(k));
        }
        out
    };
    let mut cl_l = shifted(b_coefficient(Target::E8, 1, false)?, &e8, 1);
    let c_l_2e = add(&add(&cl, &l), &scale(&add(&e8, &e9), 2));
    poly_add_term(&mut cl_l, c_l_2e, q(3));
    let cases: [(&'static str, usize, usize, ClassPoly); 3] = [
        ("thetaC*thetaL", 2, 0, cl_l),
        ("thetaC^2", 2, 2, shifted(b_coefficient(Target::L, 1, false)?, &add(&l, &add(&e8, &e9)), 2)),
        ("thetaL^2", 0, 0, shifted(b_coefficient(Target::C, 1, false)?, &add(&cl, &add(&e8, &e9)), 2)),
    ];
    let mut out = Dp2EngineCheck { order, ..Default::default() };
    for (name, i, j, expected) in cases {
        let prod: BTreeMap<V2, ClassPoly> = e.product(r[i], r[j])?;
        let got = prod.get(&[0, 0]).cloned().unwrap_or_default();
        let classes: std::collections::BTreeSet<CurveClass> = got.keys().chain(expected.keys()).cloned().collect();
        for k in classes {
            if grade(&k) >= order {
                out.fixture_only += 1;
                continue;
            }
            out.compared += 1;
            let a = got.get(&k).cloned().unwrap_or_else(|| q(0));
            let b = expected.get(&k).cloned().unwrap_or_else(|| q(0));
            if a != b {
                out.mismatches.push(Dp2TermCheck { product: name, class: k, engine: a, fixture: b });
            }
        }
    }
    Ok(out)
}
