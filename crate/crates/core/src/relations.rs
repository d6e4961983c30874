//! Presentations of the theta algebra: rewriting theta-basis expansions as
//! polynomials in the boundary generators ϑ_1..ϑ_n, the reference table of
//! mirror-family equations, and a LaTeX emitter for it.

use serde_json::{json, Value};
use std::collections::BTreeMap;

use crate::base::{det, EFunction, V2};
use crate::broken::{poly_add_term, poly_mul, poly_text, ClassPoly, ThetaEngine};
use crate::error::{Error, Result};
use crate::lattice::{self, CurveClass, SurfaceData};
use crate::series::{q, q_text, Q};

/// Polynomial in the generators: exponent vector → class coefficient.
pub type GenPoly = BTreeMap<Vec<u32>, ClassPoly>;

/// Theta-basis element Σ_R a_R ϑ_R.
pub type Expansion = BTreeMap<V2, ClassPoly>;

/// One relation `ϑ^lhs = rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Relation {
    pub lhs: Vec<u32>,
    pub rhs: GenPoly,
}

/// Theta-algebra computations relative to the boundary generators.
pub struct Presentation<'a> {
    pub engine: &'a ThetaEngine,
    pub rays: Vec<V2>,
    pub e_fn: EFunction,
}

impl<'a> Presentation<'a> {
    pub fn new(engine: &'a ThetaEngine, rays: Vec<V2>, e_fn: EFunction) -> Self {
        Presentation { engine, rays, e_fn }
    }

    fn unit(&self) -> ClassPoly {
        BTreeMap::from([(vec![0; self.engine.grading().rank()], q(1))])
    }

    /// Expansion of the generator monomial ϑ^exps.
    pub fn expand_monomial(&self, exps: &[u32]) -> Result<Expansion> {
        let mut x: Expansion = BTreeMap::from([([0, 0], self.unit())]);
        for (i, &k) in exps.iter().enumerate() {
            for _ in 0..k {
                x = self.engine.multiply(&x, self.rays[i])?;
            }
        }
        Ok(x)
    }

    /// Write R = a v_i + b v_{i+1} with a, b ≥ 0 in the cone containing R.
    pub fn cone_monomial(&self, r: V2) -> Vec<u32> {
        let n = self.rays.len();
        let mut e = vec![0u32; n];
        if r == [0, 0] {
            return e;
        }
        for i in 0..n {
            let (a, b) = (self.rays[i], self.rays[(i + 1) % n]);
            let (x, y) = (det(r, b), det(a, r));
            if x >= 0 && y >= 0 && det(a, b) == 1 {
                e[i] += x as u32;
                e[(i + 1) % n] += y as u32;
                return e;
            }
        }
        unreachable!("fan is complete")
    }

    /// Rewrite an expansion as a polynomial in the generators by peeling
    /// off the term of largest E-value with the matching cone monomial.
    pub fn reduce(&self, x: &Expansion) -> Result<GenPoly> {
        let g = self.engine.grading().clone();
        let order = self.engine.order();
        let mut work = x.clone();
        let mut out = GenPoly::new();
        let mut guard = 0;
        while let Some((&r, _)) = work
            .iter()
            .max_by(|a, b| self.e_fn.eval(*a.0).cmp(&self.e_fn.eval(*b.0)).then(a.0.cmp(b.0)))
        {
            guard += 1;
            if guard > 10_000 {
                return Err(Error::Consistency("generator rewriting does not terminate".into()));
            }
            let coef = work.remove(&r).unwrap();
            let mono = self.cone_monomial(r);
            let slot = out.entry(mono.clone()).or_default();
            for (k, v) in &coef {
                poly_add_term(slot, k.clone(), v.clone());
            }
            if slot.is_empty() {
                out.remove(&mono);
            }
            if r == [0, 0] {
                continue;
            }
            let mut exp = self.expand_monomial(&mono)?;
            let lead = exp.remove(&r).unwrap_or_default();
            if lead != self.unit() {
                return Err(Error::Consistency(format!("monomial for {:?} does not lead with ϑ_R", r)));
            }
            for (s, b) in exp {
                if self.e_fn.eval(s) >= self.e_fn.eval(r) {
                    return Err(Error::Consistency("generator rewriting is not decreasing".into()));
                }
                let c = poly_mul(&coef, &b, &g, order);
                let w = work.entry(s).or_default();
                for (k, v) in c {
                    poly_add_term(w, k, -v);
                }
                if w.is_empty() {
                    work.remove(&s);
                }
            }
        }
        Ok(out)
    }

    /// ϑ^lhs rewritten in the generators.
    pub fn relation(&self, lhs: &[u32]) -> Result<Relation> {
        let x = self.expand_monomial(lhs)?;
        Ok(Relation { lhs: lhs.to_vec(), rhs: self.reduce(&x)? })
    }

    /// The products presenting the algebra: ϑ_{i-1}ϑ_{i+1} for n ≥ 4 and
    /// the triple product for n = 3.
    pub fn relation_set(&self) -> Result<Vec<Relation>> {
        relation_shapes(self.rays.len()).iter().map(|l| self.relation(l)).collect()
    }
}

/// Left-hand sides presenting the algebra for an n-gon boundary.
pub fn relation_shapes(n: usize) -> Vec<Vec<u32>> {
    if n == 3 {
        return vec![vec![1, 1, 1]];
    }
    let mut out: Vec<Vec<u32>> = Vec::new();
    for i in 0..n {
        let mut e = vec![0u32; n];
        e[i] += 1;
        e[(i + 2) % n] += 1;
        if !out.contains(&e) {
            out.push(e);
        }
    }
    out
}

fn theta_monomial_text(e: &[u32], latex: bool) -> String {
    let mut s = String::new();
    for (i, &k) in e.iter().enumerate() {
        if k == 0 {
            continue;
        }
        if latex {
            s.push_str(&format!("\\vartheta_{{{}}}", i + 1));
            if k > 1 {
                s.push_str(&format!("^{k}"));
            }
        } else {
            s.push_str(&format!("th{}", i + 1));
            if k > 1 {
                s.push_str(&format!("^{k}"));
            }
        }
    }
    s
}

/// Plain-text rendering `th1 th3 = z^{...} th2 + ...`.
pub fn relation_text(r: &Relation, labels: &[String]) -> String {
    let terms: Vec<String> = r
        .rhs
        .iter()
        .rev()
        .map(|(e, p)| {
            let m = theta_monomial_text(e, false);
            let c = poly_text(p, labels);
            if m.is_empty() {
                c
            } else if p.len() == 1 {
                format!("{c} {m}")
            } else {
                format!("({c}) {m}")
            }
        })
        .collect();
    format!("{} = {}", theta_monomial_text(&r.lhs, false), terms.join(" + "))
}

fn latex_poly(p: &ClassPoly, labels: &[String]) -> String {
    let mut s = String::new();
    for (i, (c, a)) in p.iter().enumerate() {
        let neg = *a < q(0);
        let mag = if neg { -a.clone() } else { a.clone() };
        if i > 0 || neg {
            s.push_str(if neg { " - " } else { " + " });
        }
        if mag != q(1) {
            s.push_str(&q_text(&mag));
        }
        s.push_str(&format!("z^{{{}}}", latex_class(c, labels)));
    }
    s
}

fn latex_class(c: &[i64], labels: &[String]) -> String {
    let raw = lattice::format_class(c, labels);
    let mut out = String::new();
    let mut chars = raw.chars().peekable();
    while let Some(ch) = chars.next() {
        if ch == 'E' {
            let mut idx = String::new();
            while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                idx.push(*d);
                chars.next();
            }
            out.push_str(&format!("E_{{{idx}}}"));
        } else {
            out.push(ch);
        }
    }
    out
}

/// LaTeX tabular with one row per relation, laid out like the reference
/// table of mirror-family equations.
pub fn latex_table(rows: &[(String, Vec<Relation>)], labels: &BTreeMap<String, Vec<String>>) -> String {
    let mut s = String::from("\\begin{tabular}{l|ll}\n  Surface & Equations & Super-potential \\\\\n");
    for (name, rels) in rows {
        let l = &labels[name];
        for (k, r) in rels.iter().enumerate() {
            let terms: Vec<String> = r
                .rhs
                .iter()
                .rev()
                .map(|(e, p)| {
                    let m = theta_monomial_text(e, true);
                    let c = latex_poly(p, l);
                    match (m.is_empty(), p.len()) {
                        (true, _) => c,
                        (false, 1) => format!("{c}{m}"),
                        _ => format!("({c}){m}"),
                    }
                })
                .collect();
            let first = if k == 0 { format!("${}$", name.replace("dP", "dP_")) } else { String::new() };
            let pot = if k == 0 { "$\\sum \\vartheta_i$" } else { "" };
            s.push_str(&format!(
                "  {first} & ${} = {}$ & {pot} \\\\\n",
                theta_monomial_text(&r.lhs, true),
                terms.join(" + ")
            ));
        }
        s.push_str("  & & \\\\\n");
    }
    s.push_str("\\end{tabular}\n");
    s
}

pub fn relation_json(r: &Relation, labels: &[String]) -> Value {
    json!({
        "lhs": r.lhs,
        "rhs": r.rhs.iter().map(|(e, p)| json!({
            "monomial": e,
            "coefficient": p.iter().map(|(c, a)| json!({
                "class": lattice::format_class(c, labels),
                "coeff": q_text(a),
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "text": relation_text(r, labels),
    })
}

// ---------------------------------------------------------------------------
// Reference table

/// Parse a class written with H, E_i and boundary names D1..Dn (and D for
/// the whole boundary).
pub fn parse_with_boundary(s: &SurfaceData, text: &str) -> Result<CurveClass> {
    let mut labels = s.labels.clone();
    let n = s.boundary.len();
    for i in 0..n {
        labels.push(format!("D{}", i + 1));
    }
    labels.push("D".into());
    labels.push("SumE".into());
    let ext = lattice::parse_class(text, &labels)?;
    let r = s.rank();
    let mut out = ext[..r].to_vec();
    for i in 0..n {
        out = lattice::add(&out, &lattice::scale(&s.boundary[i], ext[r + i]));
    }
    let total = s.boundary.iter().fold(vec![0; r], |a, b| lattice::add(&a, b));
    out = lattice::add(&out, &lattice::scale(&total, ext[r + n]));
    let sum_e: CurveClass = (0..r).map(|k| if k == 0 { 0 } else { 1 }).collect();
    Ok(lattice::add(&out, &lattice::scale(&sum_e, ext[r + n + 1])))
}

/// A coefficient written as `c1*z^{cls1} + c2*z^{cls2} ...` (coefficients
/// optional, `-` allowed).
pub fn parse_poly(s: &SurfaceData, text: &str) -> Result<ClassPoly> {
    let mut p = ClassPoly::new();
    for raw in split_terms(text) {
        let (sign, body) = match raw.strip_prefix('-') {
            Some(b) => (-1, b.trim()),
            None => (1, raw.trim_start_matches('+').trim()),
        };
        let (c, m) = match body.find("z^{") {
            Some(0) => (q(1), body),
            Some(k) => (body[..k].trim_end_matches('*').trim().parse::<Q>().map_err(|_| Error::Spec(raw.clone()))?, &body[k..]),
            None => return Err(Error::Spec(format!("bad coefficient term '{raw}'"))),
        };
        let cls = m.strip_prefix("z^{").and_then(|x| x.strip_suffix('}')).ok_or_else(|| Error::Spec(raw.clone()))?;
        poly_add_term(&mut p, parse_with_boundary(s, cls)?, c * q(sign));
    }
    Ok(p)
}

fn split_terms(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0;
    for ch in text.chars() {
        match ch {
            '{' => depth += 1,
            '}' => depth -= 1,
            _ => {}
        }
        if (ch == '+' || ch == '-') && depth == 0 && !cur.trim().is_empty() {
            out.push(cur.trim().to_string());
            cur.clear();
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

/// A reference relation: left side and right side as (coefficient text,
/// generator monomial) pairs.
pub struct TableRow {
    pub lhs: Vec<u32>,
    pub rhs: Vec<(&'static str, Vec<u32>)>,
}

/// Table entries as printed. Coefficient products (such as α) are written
/// out as sums of monomials.
pub fn reference_rows(name: &str, printed: bool) -> Option<Vec<TableRow>> {
    match name {
        "dP5" => Some(vec![
            TableRow { lhs: vec![1, 0, 1, 0, 0], rhs: vec![("z^{D2}", vec![0, 1, 0, 0, 0]), ("z^{D4+D5}", vec![0; 5])] },
            TableRow {
                lhs: vec![0, 1, 0, 1, 0],
                rhs: vec![("z^{D3}", vec![0, 0, 1, 0, 0]), (if printed { "z^{D1+D4}" } else { "z^{D5+D1}" }, vec![0; 5])],
            },
            TableRow { lhs: vec![0, 0, 1, 0, 1], rhs: vec![("z^{D4}", vec![0, 0, 0, 1, 0]), ("z^{D1+D2}", vec![0; 5])] },
            TableRow { lhs: vec![1, 0, 0, 1, 0], rhs: vec![("z^{D5}", vec![0, 0, 0, 0, 1]), ("z^{D2+D3}", vec![0; 5])] },
            TableRow { lhs: vec![0, 1, 0, 0, 1], rhs: vec![("z^{D1}", vec![1, 0, 0, 0, 0]), ("z^{D3+D4}", vec![0; 5])] },
        ]),
        "dP4" => Some(vec![
            TableRow {
                lhs: vec![1, 0, 1, 0],
                rhs: vec![
                    ("z^{D2}", vec![0, 1, 0, 0]),
                    ("z^{D4}", vec![0, 0, 0, 1]),
                    ("z^{H-E1} + z^{2H-E1-E2-E3-E5} + z^{2H-E1-E2-E4-E5}", vec![0; 4]),
                ],
            },
            TableRow {
                lhs: vec![0, 1, 0, 1],
                rhs: vec![
                    ("z^{D1}", vec![1, 0, 0, 0]),
                    ("z^{D3}", vec![0, 0, 1, 0]),
                    ("z^{H-E3} + z^{H-E4} + z^{2H-E2-E3-E4-E5}", vec![0; 4]),
                ],
            },
        ]),
        "dP3" => Some(vec![TableRow {
            lhs: vec![1, 1, 1],
            rhs: vec![
                ("z^{D1}", vec![2, 0, 0]),
                ("z^{D2}", vec![0, 2, 0]),
                ("z^{D3}", vec![0, 0, 2]),
                (
                    if printed { DP3_TH1[0] } else { DP3_TH1[1] },
                    vec![1, 0, 0],
                ),
                (
                    if printed { DP3_TH2[0] } else { DP3_TH2[1] },
                    vec![0, 1, 0],
                ),
                (
                    if printed { DP3_TH3[0] } else { DP3_TH3[1] },
                    vec![0, 0, 1],
                ),
                (
                    if printed { DP3_CONST_PRINTED } else { DP3_CONST },
                    vec![0, 0, 0],
                ),
            ],
        }]),
        _ => None,
    }
}

// Coefficients of th1, th2, th3: (printed, corrected). The printed sums
// list six of the eight (-1)-curves meeting D_i; the corrected ones add the
// two conics 2H - (five of E1..E6) meeting D_i.
const DP3_TH1: [&str; 2] = [
    "z^{D1+E1} + z^{D1+E2} + z^{D1+H-E3-E5} + z^{D1+H-E3-E6} + z^{D1+H-E4-E5} + z^{D1+H-E4-E6}",
    "z^{D1+E1} + z^{D1+E2} + z^{D1+H-E3-E5} + z^{D1+H-E3-E6} + z^{D1+H-E4-E5} + z^{D1+H-E4-E6} \
     + z^{D1+2H-E1-E3-E4-E5-E6} + z^{D1+2H-E2-E3-E4-E5-E6}",
];
const DP3_TH2: [&str; 2] = [
    "z^{D2+E3} + z^{D2+E4} + z^{D2+H-E1-E5} + z^{D2+H-E1-E6} + z^{D2+H-E2-E5} + z^{D2+H-E2-E6}",
    "z^{D2+E3} + z^{D2+E4} + z^{D2+H-E1-E5} + z^{D2+H-E1-E6} + z^{D2+H-E2-E5} + z^{D2+H-E2-E6} \
     + z^{D2+2H-E1-E2-E3-E5-E6} + z^{D2+2H-E1-E2-E4-E5-E6}",
];
const DP3_TH3: [&str; 2] = [
    "z^{D3+E5} + z^{D3+E6} + z^{D3+H-E1-E3} + z^{D3+H-E1-E4} + z^{D3+H-E2-E3} + z^{D3+H-E2-E4}",
    "z^{D3+E5} + z^{D3+E6} + z^{D3+H-E1-E3} + z^{D3+H-E1-E4} + z^{D3+H-E2-E3} + z^{D3+H-E2-E4} \
     + z^{D3+2H-E1-E2-E3-E4-E5} + z^{D3+2H-E1-E2-E3-E4-E6}",
];

// z^H + (z^{2H} + z^{4H-ΣE})α + z^{3H-ΣE}(six ratios) + z^{5H-2ΣE} + 4z^{D},
// with α = (z^{-E1}+z^{-E2})(z^{-E3}+z^{-E4})(z^{-E5}+z^{-E6}) expanded.
// The printed table has -4z^{D} and lists the ratio E6-E5 twice.
const DP3_CONST: &str = "z^{H} \
 + z^{2H-E1-E3-E5} + z^{2H-E1-E3-E6} + z^{2H-E1-E4-E5} + z^{2H-E1-E4-E6} \
 + z^{2H-E2-E3-E5} + z^{2H-E2-E3-E6} + z^{2H-E2-E4-E5} + z^{2H-E2-E4-E6} \
 + z^{4H-SumE-E1-E3-E5} + z^{4H-SumE-E1-E3-E6} + z^{4H-SumE-E1-E4-E5} + z^{4H-SumE-E1-E4-E6} \
 + z^{4H-SumE-E2-E3-E5} + z^{4H-SumE-E2-E3-E6} + z^{4H-SumE-E2-E4-E5} + z^{4H-SumE-E2-E4-E6} \
 + z^{3H-SumE+E2-E1} + z^{3H-SumE+E1-E2} + z^{3H-SumE+E4-E3} + z^{3H-SumE+E3-E4} \
 + z^{3H-SumE+E6-E5} + z^{3H-SumE+E5-E6} \
 + z^{5H-2SumE} + 4z^{D}";

const DP3_CONST_PRINTED: &str = "z^{H} \
 + z^{2H-E1-E3-E5} + z^{2H-E1-E3-E6} + z^{2H-E1-E4-E5} + z^{2H-E1-E4-E6} \
 + z^{2H-E2-E3-E5} + z^{2H-E2-E3-E6} + z^{2H-E2-E4-E5} + z^{2H-E2-E4-E6} \
 + z^{4H-SumE-E1-E3-E5} + z^{4H-SumE-E1-E3-E6} + z^{4H-SumE-E1-E4-E5} + z^{4H-SumE-E1-E4-E6} \
 + z^{4H-SumE-E2-E3-E5} + z^{4H-SumE-E2-E3-E6} + z^{4H-SumE-E2-E4-E5} + z^{4H-SumE-E2-E4-E6} \
 + z^{3H-SumE+E2-E1} + z^{3H-SumE+E1-E2} + z^{3H-SumE+E4-E3} + z^{3H-SumE+E3-E4} \
 + z^{3H-SumE+E6-E5} + z^{3H-SumE+E6-E5} \
 + z^{5H-2SumE} - 4z^{D}";

/// The reference relations for a surface, parsed against its classes.
pub fn reference_relations(s: &SurfaceData, printed: bool) -> Result<Vec<Relation>> {
    let rows = reference_rows(&s.name, printed).ok_or_else(|| Error::Usage(format!("no reference table for {}", s.name)))?;
    rows.iter()
        .map(|row| {
            let mut rhs = GenPoly::new();
            for (c, m) in &row.rhs {
                let p = parse_poly(s, c)?;
                let slot = rhs.entry(m.clone()).or_default();
                for (k, v) in p {
                    poly_add_term(slot, k, v);
                }
                if slot.is_empty() {
                    rhs.remove(m);
                }
            }
            Ok(Relation { lhs: row.lhs.clone(), rhs })
        })
        .collect()
}

/// Drop coefficient terms of grade ≥ order (for comparing truncated output).
pub fn truncate_relation(r: &Relation, g: &crate::series::Grading, order: i64) -> Relation {
    let mut rhs = GenPoly::new();
    for (e, p) in &r.rhs {
        let t: ClassPoly =
            p.iter().filter(|(c, _)| crate::broken::class_grade(g, c) < order).map(|(c, a)| (c.clone(), a.clone())).collect();
        if !t.is_empty() {
            rhs.insert(e.clone(), t);
        }
    }
    Relation { lhs: r.lhs.clone(), rhs }
}

/// Terms present on one side only, as readable strings.
pub fn relation_diff(a: &Relation, b: &Relation, labels: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let keys: std::collections::BTreeSet<&Vec<u32>> = a.rhs.keys().chain(b.rhs.keys()).collect();
    let empty = ClassPoly::new();
    for k in keys {
        let pa = a.rhs.get(k).unwrap_or(&empty);
        let pb = b.rhs.get(k).unwrap_or(&empty);
        let cls: std::collections::BTreeSet<&CurveClass> = pa.keys().chain(pb.keys()).collect();
        for c in cls {
            let x = pa.get(c).cloned().unwrap_or_else(|| q(0));
            let y = pb.get(c).cloned().unwrap_or_else(|| q(0));
            if x != y {
                out.push(format!(
                    "{}: z^{{{}}} computed {} vs reference {}",
                    if k.iter().all(|e| *e == 0) { "1".to_string() } else { theta_monomial_text(k, false) },
                    lattice::format_class(c, labels),
                    q_text(&x),
                    q_text(&y)
                ));
            }
        }
    }
    out
}

/// The relations with every base monomial set to 1, as polynomials in the
/// generators `th1..thn` (each entry is lhs − rhs).
pub fn unit_fibre(rels: &[Relation], n: usize) -> (std::sync::Arc<Vec<String>>, Vec<crate::poly::Poly>) {
    let names: Vec<String> = (1..=n).map(|i| format!("th{i}")).collect();
    let vars = std::sync::Arc::new(names);
    let polys = rels
        .iter()
        .map(|r| {
            let mut p = crate::poly::Poly::zero(&vars);
            p.add_term(r.lhs.iter().map(|&e| e as i32).collect(), q(1));
            for (m, c) in &r.rhs {
                let s = c.values().fold(q(0), |a, b| a + b);
                p.add_term(m.iter().map(|&e| e as i32).collect(), -s);
            }
            p
        })
        .collect();
    (vars, polys)
}
