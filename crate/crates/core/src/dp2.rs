//! dP2 assembly in the model blown up at the two points of C ∩ L: the
//! N_k(−,t) orbit products, the B_k coefficients, the six theta relations,
//! restriction of the base and elimination to a single family equation.

use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::broken::{poly_add_term, ClassPoly};
use crate::error::{Error, Result};
use crate::lattice::{self, orbit_expand, parse_class, standard_labels, CurveClass, Symmetry};
use crate::poly::Poly;
use crate::series::{q, Q};

/// The four boundary classes of the blown-up dP2 that carry B coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    C,
    L,
    E8,
    E9,
}

impl Target {
    pub const ALL: [Target; 4] = [Target::C, Target::L, Target::E8, Target::E9];

    pub fn name(self) -> &'static str {
        match self {
            Target::C => "C",
            Target::L => "L",
            Target::E8 => "E8",
            Target::E9 => "E9",
        }
    }

    pub fn parse(s: &str) -> Result<Target> {
        match s {
            "C" => Ok(Target::C),
            "L" => Ok(Target::L),
            "E8" => Ok(Target::E8),
            "E9" => Ok(Target::E9),
            _ => Err(Error::Usage(format!("unknown dP2 class label '{s}' (expected C, L, E8 or E9)"))),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One orbit factor `∏(1 + c·t·z^{template})`, with the printed template.
#[derive(Clone, Copy, Debug)]
pub struct FactorText {
    pub coeff: i64,
    pub template: &'static str,
}

/// Verbatim N_k(−,t) product as printed.
#[derive(Clone, Copy, Debug)]
pub struct ProductText {
    pub target: Target,
    pub k: u32,
    pub factors: &'static [FactorText],
}

const fn f(coeff: i64, template: &'static str) -> FactorText {
    FactorText { coeff, template }
}

/// The N_k orbit products, transcribed verbatim.
pub const N_PRODUCTS: &[ProductText] = &[
    ProductText {
        target: Target::C,
        k: 3,
        factors: &[
            f(9, "2H-E1-E2-E3"),
            f(9, "3H-2E1-E2-E3-E4-E5"),
            f(9, "4H-2E1-2E2-2E3-E4-E5-E6"),
            f(9, "4H-3E1-E2-E3-E4-E5-E6-E7"),
            f(72, "4H-2E1-2E2-E3-E4-E5-E6-E7"),
            f(9, "5H-3E1-2E2-2E3-2E4-E5-E6-E7"),
            f(9, "6H-3E1-3E2-2E3-2E4-2E5-2E6-E7"),
        ],
    },
    ProductText {
        target: Target::C,
        k: 2,
        factors: &[
            f(4, "H-E1"),
            f(4, "2H-E1-E2-E3-E4"),
            f(4, "3H-2E1-E2-E3-E4-E5-E6"),
            f(4, "4H-2E1-2E2-2E3-E4-E5-E6-E7"),
        ],
    },
    ProductText {
        target: Target::C,
        k: 1,
        factors: &[f(1, "E3"), f(1, "H-E1-E3"), f(1, "2H-E1-E2-E3-E4-E5"), f(1, "3H-2E1-2E2-2E3-E4-E5-E6")],
    },
    ProductText {
        target: Target::L,
        k: 3,
        factors: &[
            f(9, "3H-2E3-E4-E5-E6-E7"),
            f(9, "4H-E1-2E3-2E4-2E5-E6-E7"),
            f(9, "5H-E1-E2-3E3-2E4-2E5-2E6-E7"),
            f(72, "5H-E1-E2-2E3-2E4-2E5-2E6-2E7"),
            f(9, "5H-2E1-2E3-2E4-2E5-2E6-2E7"),
            f(9, "6H-2E1-E2-3E3-3E4-2E5-2E6-2E7"),
            f(9, "7H-2E1-2E2-3E3-3E4-3E5-3E6-2E7"),
        ],
    },
    ProductText {
        target: Target::L,
        k: 2,
        factors: &[
            f(4, "2H-E3-E4-E5-E6"),
            f(4, "3H-E1-2E3-E4-E5-E6-E7"),
            f(4, "4H-E1-E2-2E3-2E4-2E5-E6-E7"),
            f(4, "5H-2E1-E2-2E3-2E4-2E5-2E6-2E7"),
        ],
    },
    ProductText {
        target: Target::L,
        k: 1,
        factors: &[f(1, "E1"), f(1, "H-E3-E4"), f(1, "2H-E1-E3-E4-E5-E6"), f(1, "3H-E1-E2-2E3-E4-E5-E6-E7")],
    },
    ProductText {
        target: Target::E8,
        k: 1,
        factors: &[
            f(1, "H-E3-E8"),
            f(1, "2H-E1-E3-E4-E5-E8"),
            f(9, "3H-E1-E2-E3-E4-E5-E6-E7-E8"),
            f(1, "3H-E1-E2-2E3-E4-E5-E6-E8"),
            f(1, "3H-2E1-E3-E4-E5-E6-E7-E8"),
            f(1, "4H-2E1-E2-2E3-2E4-E5-E6-E7-E8"),
            f(1, "5H-2E1-2E2-2E3-2E4-2E5-2E6-E7-E8"),
        ],
    },
    ProductText {
        target: Target::E9,
        k: 1,
        factors: &[
            f(1, "H-E3-E9"),
            f(1, "2H-E1-E3-E4-E5-E9"),
            f(9, "3H-E1-E2-E3-E4-E5-E6-E7-E9"),
            f(1, "3H-E1-E2-2E3-E4-E5-E6-E9"),
            f(1, "3H-2E1-E3-E4-E5-E6-E7-E9"),
            f(1, "4H-2E1-E2-2E3-2E4-E5-E6-E7-E9"),
            f(1, "5H-2E1-2E2-2E3-2E4-2E5-2E6-E7-E9"),
        ],
    },
];

/// A correction applied on top of the verbatim fixture.
#[derive(Clone, Copy, Debug)]
pub struct Erratum {
    pub target: Target,
    pub k: u32,
    pub printed: &'static str,
    pub corrected: &'static str,
    pub reason: &'static str,
}

/// The printed last factor of N_1(C) has anticanonical degree 0 and an orbit
/// of size 20, which gives B_1(C) = 45 instead of 27; the class with degree 1
/// and orbit size 2 mirrors the last factor of N_1(L) under C ↔ L.
pub const ERRATA: &[Erratum] = &[Erratum {
    target: Target::C,
    k: 1,
    printed: "3H-2E1-2E2-2E3-E4-E5-E6",
    corrected: "3H-2E1-E2-E3-E4-E5-E6-E7",
    reason: "printed class has -K degree 0 and orbit size 20 (B1(C) would be 45); corrected class has degree 1 and orbit size 2",
}];

/// Labels H, E1, ..., E9 of the blown-up model.
pub fn labels() -> Vec<String> {
    standard_labels(9)
}

/// C2 on {E1,E2} times S5 on {E3..E7}; E8 and E9 are fixed.
pub fn symmetry() -> Symmetry {
    Symmetry::new(vec![vec![1, 2], vec![3, 4, 5, 6, 7]], 10).expect("static symmetry")
}

/// An orbit product with parsed templates.
#[derive(Clone, Debug)]
pub struct OrbitProduct {
    pub target: Target,
    pub k: u32,
    pub factors: Vec<(i64, CurveClass)>,
    pub corrected: bool,
}

impl OrbitProduct {
    /// Expansion in t up to t^max_t: entry j is the coefficient of t^j.
    /// Each factor contributes t^k (the product N_k(−, t^k)).
    pub fn expand(&self, max_t: u32) -> Vec<ClassPoly> {
        let sym = symmetry();
        let mut acc: Vec<ClassPoly> = vec![ClassPoly::new(); max_t as usize + 1];
        acc[0].insert(vec![0; 10], q(1));
        for (c, tmpl) in &self.factors {
            for cls in orbit_expand(tmpl, &sym) {
                let mut next = acc.clone();
                for j in 0..=max_t as usize {
                    let jj = j + self.k as usize;
                    if jj > max_t as usize {
                        break;
                    }
                    for (m, a) in &acc[j] {
                        poly_add_term(&mut next[jj], lattice::add(m, &cls), a * q(*c));
                    }
                }
                acc = next;
            }
        }
        acc
    }

    /// N_k(−,t)^{(1)}: sum of c·z^α over all orbit members.
    pub fn linear_part(&self) -> ClassPoly {
        let sym = symmetry();
        let mut out = ClassPoly::new();
        for (c, tmpl) in &self.factors {
            for cls in orbit_expand(tmpl, &sym) {
                poly_add_term(&mut out, cls, q(*c));
            }
        }
        out
    }
}

/// The fixture products, with errata applied unless `printed` is set.
pub fn products(printed: bool) -> Result<Vec<OrbitProduct>> {
    let labels = labels();
    N_PRODUCTS
        .iter()
        .map(|p| {
            let mut corrected = false;
            let factors = p
                .factors
                .iter()
                .map(|ft| {
                    let mut text = ft.template;
                    if !printed {
                        if let Some(e) =
                            ERRATA.iter().find(|e| e.target == p.target && e.k == p.k && e.printed == ft.template)
                        {
                            text = e.corrected;
                            corrected = true;
                        }
                    }
                    Ok((ft.coeff, parse_class(text, &labels)?))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(OrbitProduct { target: p.target, k: p.k, factors, corrected })
        })
        .collect()
}

pub fn product(target: Target, k: u32, printed: bool) -> Result<OrbitProduct> {
    products(printed)?
        .into_iter()
        .find(|p| p.target == target && p.k == k)
        .ok_or_else(|| Error::Usage(format!("no N_{k}({target}) in the fixture")))
}

/// B_i(target): coefficient of t^i in ∏_k N_k(target, t^k).
pub fn b_coefficient(target: Target, i: u32, printed: bool) -> Result<ClassPoly> {
    if !(1..=3).contains(&i) {
        return Err(Error::Usage(format!("B_{i} is outside the fixture range 1..3")));
    }
    let mut acc: Vec<ClassPoly> = vec![ClassPoly::new(); i as usize + 1];
    acc[0].insert(vec![0; 10], q(1));
    for p in products(printed)?.into_iter().filter(|p| p.target == target) {
        let e = p.expand(i);
        let mut next = vec![ClassPoly::new(); i as usize + 1];
        for a in 0..=i as usize {
            for b in 0..=(i as usize - a) {
                for (m1, x) in &acc[a] {
                    for (m2, y) in &e[b] {
                        poly_add_term(&mut next[a + b], lattice::add(m1, m2), x * y);
                    }
                }
            }
        }
        acc = next;
    }
    Ok(acc.swap_remove(i as usize))
}

/// Value of a class polynomial with every monomial set to 1.
pub fn at_ones(p: &ClassPoly) -> Q {
    p.values().fold(Q::zero(), |a, b| a + b)
}

/// The eight reference B-values: B3, B2, B1 of C, then of L, then B1(E8), B1(E9).
pub const B_VALUES: [(Target, u32, i64); 8] = [
    (Target::C, 3, 6561),
    (Target::C, 2, 459),
    (Target::C, 1, 27),
    (Target::L, 3, 6561),
    (Target::L, 2, 459),
    (Target::L, 1, 27),
    (Target::E8, 1, 81),
    (Target::E9, 1, 81),
];

/// All eight B-values computed by expanding the orbit products.
pub fn b_values(printed: bool) -> Result<Vec<(Target, u32, Q)>> {
    B_VALUES.iter().map(|&(t, i, _)| Ok((t, i, at_ones(&b_coefficient(t, i, printed)?)))).collect()
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

/// Orbit size under C2 × S5 by the multinomial formula.
fn orbit_size(c: &[i64]) -> u64 {
    let block = |idx: &[usize]| {
        let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
        for &i in idx {
            *counts.entry(c[i]).or_default() += 1;
        }
        factorial(idx.len() as u64) / counts.values().map(|&m| factorial(m)).product::<u64>()
    };
    block(&[1, 2]) * block(&[3, 4, 5, 6, 7])
}

fn binomial(n: u64, k: u64) -> Q {
    if k > n {
        return Q::zero();
    }
    q(((n - k + 1)..=n).product::<u64>() as i64) / q(factorial(k) as i64)
}

/// Independent numeric oracle for B_i at all monomials 1: each factor
/// family is (1 + c t^k)^{orbit size}, expanded by the binomial theorem.
pub fn b_value_oracle(target: Target, i: u32, printed: bool) -> Result<Q> {
    let mut acc = vec![Q::zero(); i as usize + 1];
    acc[0] = Q::one();
    for p in products(printed)?.into_iter().filter(|p| p.target == target) {
        for (c, tmpl) in &p.factors {
            let n = orbit_size(tmpl);
            let mut next = vec![Q::zero(); i as usize + 1];
            for (a, x) in acc.iter().enumerate() {
                let mut j = 0u64;
                while a + (j * p.k as u64) as usize <= i as usize {
                    let w = binomial(n, j) * num_traits::pow(q(*c), j as usize);
                    next[a + (j * p.k as u64) as usize] += x * w;
                    j += 1;
                }
            }
            acc = next;
        }
    }
    Ok(acc.swap_remove(i as usize))
}

/// Check of z^C N_3(C)^{(1)} = 9 z^{C+L} N_1(E8)^{(1)} − 9 z^{−2K}, with
/// C = 2H−E3−…−E7, L = H−E1−E2, −2K = 6H−2(E1+…+E7) and the E8, E9
/// coordinates projected away. Returns (lhs, rhs).
pub fn orbit_identity() -> Result<(ClassPoly, ClassPoly)> {
    let labels = labels();
    let c = parse_class("2H-E3-E4-E5-E6-E7", &labels)?;
    let l = parse_class("H-E1-E2", &labels)?;
    let k2 = parse_class("6H-2E1-2E2-2E3-2E4-2E5-2E6-2E7", &labels)?;
    let project = |mut v: CurveClass| {
        v[8] = 0;
        v[9] = 0;
        v
    };
    let mut lhs = ClassPoly::new();
    for (m, a) in product(Target::C, 3, false)?.linear_part() {
        poly_add_term(&mut lhs, project(lattice::add(&c, &m)), a);
    }
    let cl = lattice::add(&c, &l);
    let mut rhs = ClassPoly::new();
    for (m, a) in product(Target::E8, 1, false)?.linear_part() {
        poly_add_term(&mut rhs, project(lattice::add(&cl, &m)), a * q(9));
    }
    poly_add_term(&mut rhs, k2, q(-9));
    Ok((lhs, rhs))
}

/// Variables of the relation ring: theta functions, base monomials and the
/// B coefficients treated as opaque symbols.
pub const RELATION_VARS: &[&str] = &[
    "t8", "t9", "tC", "tL", "t2C", "t2L", "t3C", "t3L", "zC", "zL", "z8", "z9", "b1C", "b2C", "b3C", "b1L", "b2L",
    "b3L", "b8", "b9",
];

pub fn relation_vars() -> Arc<Vec<String>> {
    crate::poly::vars(RELATION_VARS)
}

/// A relation `lhs = rhs` in the relation ring.
#[derive(Clone, Debug, PartialEq)]
pub struct Dp2Relation {
    pub name: String,
    pub lhs: Poly,
    pub rhs: Poly,
}

impl Dp2Relation {
    pub fn residual(&self) -> Poly {
        self.lhs.sub(&self.rhs)
    }
}

/// The six relations with every coefficient filled in, as displayed for the
/// blown-up dP2 (tX = ϑ_X, tnX = ϑ_{nX}, zX = z^X, z8 = z^{E8}, bkX = B_k(X),
/// b8 = B_1(E8), b9 = B_1(E9)).
pub const RELATION_TEXT: &[(&str, &str, &str)] = &[
    ("thetaC*thetaL", "tC*tL", "z8*t8 + z9*t9 + 3*zC*zL*z8^2*z9^2 + b8*z8"),
    (
        "theta8*theta9",
        "t8*t9",
        "t3L*zL + t2L*b1L*zL + tL*b2L*zL + zC*b3C + 3*zC^2*zL^2*z8^3*z9^3 + tC*b2C*zC + t2C*b1C*zC + t3C*zC",
    ),
    (
        "thetaC^3",
        "tC^3",
        "t3C + 3*b1L*zL*z8*z9*tC + 6*zC*zL^2*z8^3*z9^3 + 6*b9*zL*z8*z9^2 + 3*zL*z8^2*z9*t8 + 3*zL*z8*z9^2*t9",
    ),
    (
        "thetaL^3",
        "tL^3",
        "t3L + 3*b1C*zC*z8*z9*tL + 6*zC^2*zL*z8^3*z9^3 + 6*b8*zC*z8^2*z9 + 3*zC*z8*z9^2*t9 + 3*zC*z8^2*z9*t8",
    ),
    ("thetaC^2", "tC^2", "t2C + 2*tL*zL*z8*z9 + 2*b1L*zL*z8*z9"),
    ("thetaL^2", "tL^2", "t2L + 2*tC*zC*z8*z9 + 2*b1C*zC*z8*z9"),
];

pub fn relations() -> Result<Vec<Dp2Relation>> {
    let v = relation_vars();
    RELATION_TEXT
        .iter()
        .map(|(n, l, r)| Ok(Dp2Relation { name: n.to_string(), lhs: Poly::parse(&v, l)?, rhs: Poly::parse(&v, r)? }))
        .collect()
}

/// Substitute `var -> value` in every relation.
pub fn restrict_base(rels: &[Dp2Relation], assignments: &[(&str, Poly)]) -> Result<Vec<Dp2Relation>> {
    rels.iter()
        .map(|r| {
            let mut lhs = r.lhs.clone();
            let mut rhs = r.rhs.clone();
            for (name, val) in assignments {
                lhs = lhs.subs_name(name, val)?;
                rhs = rhs.subs_name(name, val)?;
            }
            Ok(Dp2Relation { name: r.name.clone(), lhs, rhs })
        })
        .collect()
}

/// The locus z^{E8} = z^{E9} = 1. There B_1(E9) and B_1(E8) coincide (see
/// [`b1_e8_e9_agree_on_locus`]), so b9 is identified with b8.
pub fn standard_locus() -> Vec<(&'static str, Poly)> {
    let v = relation_vars();
    vec![
        ("z8", Poly::constant(&v, q(1))),
        ("z9", Poly::constant(&v, q(1))),
        ("b9", Poly::var(&v, "b8").expect("b8 is a relation variable")),
    ]
}

/// True when B_1(E8) and B_1(E9) agree once z^{E8} = z^{E9} = 1.
pub fn b1_e8_e9_agree_on_locus() -> Result<bool> {
    let drop = |p: ClassPoly| {
        let mut out = ClassPoly::new();
        for (mut m, a) in p {
            m[8] = 0;
            m[9] = 0;
            poly_add_term(&mut out, m, a);
        }
        out
    };
    Ok(drop(b_coefficient(Target::E8, 1, false)?) == drop(b_coefficient(Target::E9, 1, false)?))
}

/// The family equation `(ϑ_{E8} − ϑ_{E9})² = rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Family {
    pub rhs: Poly,
}

/// Solve `var` from the first relation where it occurs linearly with a
/// constant coefficient, substitute everywhere else and drop that relation.
fn eliminate_linear(rels: &mut Vec<Dp2Relation>, var: &str) -> Result<Poly> {
    let i = rels[0].lhs.var_index(var)?;
    let pos = rels
        .iter()
        .position(|r| {
            let res = r.residual();
            res.degree_in(i) == 1 && {
                let c = res.coeff_in(i, 1);
                c.len() == 1 && c.terms().keys().next().is_some_and(|m| m.iter().all(|e| *e == 0))
            }
        })
        .ok_or_else(|| Error::Integrity(format!("no relation is linear in {var}")))?;
    let res = rels.remove(pos).residual();
    let c = res.coeff_in(i, 1).terms().values().next().cloned().expect("nonzero coefficient");
    let rest = res.coeff_in(i, 0);
    let val = rest.scale(&(-c.recip()));
    for r in rels.iter_mut() {
        r.lhs = r.lhs.subs(i, &val)?;
        r.rhs = r.rhs.subs(i, &val)?;
    }
    Ok(val)
}

/// Eliminate ϑ_{2C}, ϑ_{2L}, ϑ_{3C}, ϑ_{3L} and ϑ_{E8} from relations that
/// already live on the locus z^{E8} = z^{E9} = 1, leaving one equation for
/// (ϑ_{E8} − ϑ_{E9})².
pub fn eliminate_to_family(rels: &[Dp2Relation]) -> Result<Family> {
    let mut rels = rels.to_vec();
    if rels.is_empty() {
        return Err(Error::Usage("no relations given".into()));
    }
    for var in ["t2C", "t2L", "t3C", "t3L"] {
        eliminate_linear(&mut rels, var)?;
    }
    // t8 = S − t9 from the ϑ_Cϑ_L relation.
    let t8 = eliminate_linear(&mut rels, "t8")?;
    let i9 = t8.var_index("t9")?;
    let s = t8.add(&Poly::var(t8.vars(), "t9")?);
    if s.degree_in(i9) != 0 {
        return Err(Error::Integrity("ϑ_{E8} + ϑ_{E9} does not separate".into()));
    }
    if rels.len() != 1 {
        return Err(Error::Integrity(format!("{} relations left after elimination", rels.len())));
    }
    // Remaining: t9 (S − t9) = P, i.e. residual = k (S t9 − t9² − P).
    let res = rels.pop().expect("one relation").residual();
    if res.degree_in(i9) != 2 {
        return Err(Error::Integrity("remaining relation is not quadratic in ϑ_{E9}".into()));
    }
    let k = res.coeff_in(i9, 2).scale(&q(-1));
    if k.len() != 1 || !k.terms().keys().next().is_some_and(|m| m.iter().all(|e| *e == 0)) {
        return Err(Error::Integrity("leading ϑ_{E9} coefficient is not constant".into()));
    }
    let kc = k.terms().values().next().cloned().expect("constant");
    let lin = res.coeff_in(i9, 1).scale(&kc.recip());
    if !lin.sub(&s).is_zero() {
        return Err(Error::Integrity(format!("elimination residual {} is nonzero", lin.sub(&s))));
    }
    let p = res.coeff_in(i9, 0).scale(&(-kc.recip()));
    // (t8 − t9)² = (S − 2 t9)² = S² − 4 (S t9 − t9²) = S² − 4 P.
    let rhs = s.mul(&s).sub(&p.scale(&q(4)));
    if !rhs.is_integral() {
        return Err(Error::Integrity("family equation has non-integer coefficients".into()));
    }
    Ok(Family { rhs })
}

/// The full pipeline: fixture relations, restriction, elimination.
pub fn family() -> Result<Family> {
    eliminate_to_family(&restrict_base(&relations()?, &standard_locus())?)
}

/// The printed family equation, right-hand side, verbatim.
pub const PRINTED_FAMILY: &str = "tC^2*tL^2 - 4*tC^3*zC - 4*tL^3*zL + 18*tC*tL*zC*zL - 27*zC^2*zL^2 \
     - 4*tL^2*zL*b1L - 4*tC^2*zC*b1C + 20*tC*zC*zL*b1L + 20*tL*zC*zL*b1C + 16*zC*zL*b1L*b1C \
     - 4*tL*zL*b2L - 4*tC*zC*b2C - 2*tC*tL*b8 + 30*zC*zL*b8 - 4*zC*b3C - b8^2";

pub fn printed_family() -> Result<Family> {
    Ok(Family { rhs: Poly::parse(&relation_vars(), PRINTED_FAMILY)? })
}

/// Term-by-term differences `computed − reference`, as readable lines.
pub fn family_diff(computed: &Family, reference: &Family) -> Vec<String> {
    let d = computed.rhs.sub(&reference.rhs);
    d.terms()
        .iter()
        .rev()
        .map(|(m, _)| {
            format!(
                "{}: computed {} vs reference {}",
                if m.iter().all(|e| *e == 0) { "1".to_string() } else { d.mono_text(m) },
                crate::series::q_text(&computed.rhs.coeff(m)),
                crate::series::q_text(&reference.rhs.coeff(m))
            )
        })
        .collect()
}

/// Substitution of the reduced B-values and z^C = z^L = 1 (the fibre used
/// for the Jacobian check).
pub fn unit_fibre_assignments(printed: bool) -> Result<Vec<(String, Q)>> {
    let vals = b_values(printed)?;
    let get = |t: Target, i: u32| vals.iter().find(|(a, b, _)| *a == t && *b == i).map(|x| x.2.clone()).unwrap();
    Ok(vec![
        ("zC".into(), q(1)),
        ("zL".into(), q(1)),
        ("b1C".into(), get(Target::C, 1)),
        ("b2C".into(), get(Target::C, 2)),
        ("b3C".into(), get(Target::C, 3)),
        ("b1L".into(), get(Target::L, 1)),
        ("b2L".into(), get(Target::L, 2)),
        ("b3L".into(), get(Target::L, 3)),
        ("b8".into(), get(Target::E8, 1)),
        ("b9".into(), get(Target::E9, 1)),
    ])
}

pub fn substitute(p: &Poly, assignments: &[(String, Q)]) -> Result<Poly> {
    let mut out = p.clone();
    for (n, v) in assignments {
        out = out.subs_const(out.var_index(n)?, v)?;
    }
    Ok(out)
}

/// The two generators of the unit fibre in (tC, tL, t8, t9): the ϑ_Cϑ_L
/// relation and the ϑ_{E8}ϑ_{E9} relation after eliminating ϑ_{2·}, ϑ_{3·}.
pub fn unit_fibre_generators(printed: bool) -> Result<Vec<Poly>> {
    let mut rels = restrict_base(&relations()?, &standard_locus())?;
    for var in ["t2C", "t2L", "t3C", "t3L"] {
        eliminate_linear(&mut rels, var)?;
    }
    let a = unit_fibre_assignments(printed)?;
    let v = crate::poly::vars(&["tC", "tL", "t8", "t9"]);
    rels.iter()
        .map(|r| {
            let p = substitute(&r.residual(), &a)?;
            let mut out = Poly::zero(&v);
            let idx: Vec<usize> = ["tC", "tL", "t8", "t9"].iter().map(|n| p.var_index(n).unwrap()).collect();
            for (m, c) in p.terms() {
                for (j, e) in m.iter().enumerate() {
                    if *e != 0 && !idx.contains(&j) {
                        return Err(Error::Integrity(format!("variable {} survives substitution", p.vars()[j])));
                    }
                }
                out.add_term(idx.iter().map(|&j| m[j]).collect(), c.clone());
            }
            Ok(out)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn b_values_match_reference() {
        for ((t, i, v), (_, _, want)) in b_values(false).unwrap().into_iter().zip(B_VALUES) {
            assert_eq!(v, q(want), "B{i}({t})");
            assert_eq!(b_value_oracle(t, i, false).unwrap(), q(want), "oracle B{i}({t})");
        }
    }

    #[test]
    fn printed_n1c_gives_45() {
        assert_eq!(at_ones(&b_coefficient(Target::C, 1, true).unwrap()), q(45));
        assert_eq!(b_value_oracle(Target::C, 1, true).unwrap(), q(45));
    }

    #[test]
    fn orbit_identity_holds() {
        let (l, r) = orbit_identity().unwrap();
        assert_eq!(l, r);
    }

    #[test]
    fn e8_e9_agree() {
        assert!(b1_e8_e9_agree_on_locus().unwrap());
    }

    #[test]
    fn family_matches_printed_up_to_b8_square() {
        let fam = family().unwrap();
        let printed = printed_family().unwrap();
        let d = fam.rhs.sub(&printed.rhs);
        assert_eq!(d, Poly::parse(&relation_vars(), "2*b8^2").unwrap());
        assert_eq!(family_diff(&fam, &printed).len(), 1);
    }

    #[test]
    fn central_fibre_two_vertex() {
        let fam = family().unwrap();
        let zero: Vec<(String, Q)> =
            ["zC", "zL", "b1C", "b2C", "b3C", "b1L", "b2L", "b3L", "b8"].iter().map(|n| (n.to_string(), q(0))).collect();
        let p = substitute(&fam.rhs, &zero).unwrap();
        assert_eq!(p, Poly::parse(&relation_vars(), "tC^2*tL^2").unwrap());
    }

    #[test]
    fn c_l_symmetry() {
        let fam = family().unwrap();
        let v = relation_vars();
        let pairs = [("tC", "tL"), ("zC", "zL"), ("b1C", "b1L"), ("b2C", "b2L"), ("b3C", "b3L")];
        let swapped: Vec<String> = v
            .iter()
            .map(|n| {
                pairs
                    .iter()
                    .find_map(|(a, b)| if n == a { Some(b.to_string()) } else if n == b { Some(a.to_string()) } else { None })
                    .unwrap_or_else(|| n.clone())
            })
            .collect();
        let renamed = fam.rhs.rebase(&Arc::new(swapped)).unwrap();
        let renamed = Poly::parse(&v, &renamed.to_string()).unwrap();
        // z^L B3(L) = z^C B3(C)
        let fix = Poly::parse(&v, "zC*b3C*zL^-1").unwrap();
        let lhs = renamed.subs_name("b3L", &fix).unwrap();
        assert_eq!(lhs, fam.rhs);
    }
}
