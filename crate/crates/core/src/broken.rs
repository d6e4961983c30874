//! Broken lines in a conical consistent scattering diagram on R² and the
//! theta-function multiplication rule they define.
//!
//! Because every wall is a ray from the origin, the combinatorial type of a
//! broken line is determined by its sequence of bends: a bend on wall w_i
//! followed by travel in direction d_i can next bend on w_{i+1} exactly when
//! w_{i+1} lies in the open cone spanned by w_i and d_i, and the line can
//! end at z exactly when z lies in the open cone spanned by the last wall
//! and the final direction. The endpoint itself is the symbolic point
//! R + εu1 + ε²u2 for an infinitesimal ε.

use rayon::prelude::*;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::sync::Arc;

use crate::base::{det, EFunction, PlFunction, V2};
use crate::error::{Error, Result};
use crate::lattice::{self, CurveClass};
use crate::scatter::ScatteringDiagram;
use crate::series::{q, q_text, Exponent, Grading, Q};

/// A polynomial in the class variables: class → coefficient.
pub type ClassPoly = BTreeMap<CurveClass, Q>;

pub fn poly_add_term(p: &mut ClassPoly, c: CurveClass, a: Q) {
    use std::collections::btree_map::Entry;
    if a == q(0) {
        return;
    }
    match p.entry(c) {
        Entry::Vacant(v) => {
            v.insert(a);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += a;
            if *o.get() == q(0) {
                o.remove();
            }
        }
    }
}

/// Product of class polynomials, dropping terms of grade ≥ order.
pub fn poly_mul(a: &ClassPoly, b: &ClassPoly, g: &Grading, order: i64) -> ClassPoly {
    let mut out = ClassPoly::new();
    for (c1, x) in a {
        for (c2, y) in b {
            let c = lattice::add(c1, c2);
            if class_grade(g, &c) < order {
                poly_add_term(&mut out, c, x * y);
            }
        }
    }
    out
}

pub fn class_grade(g: &Grading, c: &[i64]) -> i64 {
    g.weights.iter().zip(c).map(|(w, x)| w * x).sum()
}

/// Render a class polynomial like `z^[1,0,-1] + 2*z^[0,1,0]`.
pub fn poly_text(p: &ClassPoly, labels: &[String]) -> String {
    if p.is_empty() {
        return "0".into();
    }
    p.iter()
        .map(|(c, a)| {
            let m = format!("z^{{{}}}", lattice::format_class(c, labels));
            if *a == q(1) {
                m
            } else {
                format!("{}*{}", q_text(a), m)
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// The point R + εu1 + ε²u2 (for R = 0, the direction u1 + εu2).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Endpoint {
    pub base: V2,
    pub u1: V2,
    pub u2: V2,
}

impl Endpoint {
    pub fn near(base: V2) -> Self {
        Endpoint { base, u1: [2, 7], u2: [-5, 3] }
    }

    pub fn with_perturbation(base: V2, u1: V2, u2: V2) -> Self {
        Endpoint { base, u1, u2 }
    }

    /// Coefficients of det(a, z) as a polynomial in ε, leading first.
    fn det_with(&self, a: V2) -> i64 {
        let series = if self.base == [0, 0] {
            [det(a, self.u1), det(a, self.u2), 0]
        } else {
            [det(a, self.base), det(a, self.u1), det(a, self.u2)]
        };
        series.iter().copied().find(|x| *x != 0).map(|x| x.signum()).unwrap_or(0)
    }

    /// Is z = αa + βb with α, β > 0? (a, b not parallel.)
    pub fn in_cone(&self, a: V2, b: V2) -> bool {
        let dab = det(a, b).signum();
        if dab == 0 {
            return false;
        }
        // z = αa + βb: β = det(a,z)/det(a,b), α = det(z,b)/det(a,b)
        let beta = self.det_with(a) * dab;
        let alpha = -self.det_with(b) * dab;
        alpha > 0 && beta > 0
    }

    /// True when z is not on the line spanned by `v`.
    pub fn off_line(&self, v: V2) -> bool {
        self.det_with(v) != 0
    }
}

/// Is w = αa + βb with α, β > 0?
pub fn in_convex_cone(w: V2, a: V2, b: V2) -> bool {
    let dab = det(a, b);
    if dab == 0 {
        return false;
    }
    let s = dab.signum();
    det(a, w) * s > 0 && det(w, b) * s > 0
}

/// A bend: the wall it happens on and the term of f^e picked there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bend {
    pub wall: V2,
    pub term: Exponent,
    pub coeff: Q,
}

/// A broken line up to where it ends; `mono`/`coeff` are the final
/// monomial m(0) and its coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrokenLine {
    pub initial: V2,
    pub bends: Vec<Bend>,
    pub mono: Exponent,
    pub coeff: Q,
}

impl BrokenLine {
    /// Direction of travel after the last bend.
    pub fn velocity(&self) -> V2 {
        [-self.mono.dir[0], -self.mono.dir[1]]
    }

    /// Can this line end at `z`?
    pub fn ends_at(&self, z: &Endpoint) -> bool {
        let d = self.velocity();
        if d == [0, 0] {
            return false;
        }
        match self.bends.last() {
            None => z.off_line(self.initial),
            Some(b) => z.in_cone(b.wall, d),
        }
    }

    /// Velocities before and after every bend, for invariant checks.
    pub fn velocities(&self) -> Vec<V2> {
        let mut v = vec![[-self.initial[0], -self.initial[1]]];
        let mut m = self.initial;
        for b in &self.bends {
            m = [m[0] + b.term.dir[0], m[1] + b.term.dir[1]];
            v.push([-m[0], -m[1]]);
        }
        v
    }

    pub fn to_json(&self, labels: &[String]) -> Value {
        json!({
            "initial": self.initial,
            "bends": self.bends.iter().map(|b| json!({
                "wall": b.wall,
                "term": crate::series::term_text(&b.term, &b.coeff),
            })).collect::<Vec<_>>(),
            "final": crate::series::term_text(&self.mono, &self.coeff),
            "finalClass": lattice::format_class(&self.mono.cls, labels),
        })
    }
}

/// Theta functions of a consistent diagram on a flattened base.
pub struct ThetaEngine {
    pub diagram: ScatteringDiagram,
    pub phi: PlFunction,
    pub e_fn: Option<EFunction>,
    /// Optional pruning: bends only on walls w with E(w) ≤ budget.
    pub budget: Option<i64>,
    lines: std::sync::Mutex<BTreeMap<V2, Arc<Vec<BrokenLine>>>>,
}

impl ThetaEngine {
    /// Refuses diagrams whose loop is not the identity.
    pub fn new(diagram: ScatteringDiagram, phi: PlFunction) -> Result<Self> {
        let img = diagram.loop_automorphism(diagram.pick_start())?;
        if !img.is_identity() {
            return Err(Error::Consistency("theta functions need a consistent diagram".into()));
        }
        Ok(ThetaEngine { diagram, phi, e_fn: None, budget: None, lines: Default::default() })
    }

    pub fn with_budget(mut self, e_fn: EFunction, budget: i64) -> Self {
        self.e_fn = Some(e_fn);
        self.budget = Some(budget);
        self
    }

    pub fn order(&self) -> i64 {
        self.diagram.order
    }

    pub fn grading(&self) -> &Arc<Grading> {
        &self.diagram.grading
    }

    /// The lift (v, φ(v)).
    pub fn lift(&self, v: V2) -> Exponent {
        Exponent::new(v, self.phi.eval(v))
    }

    fn wall_allowed(&self, w: V2) -> bool {
        match (&self.e_fn, self.budget) {
            (Some(e), Some(b)) => e.eval(w) <= q(b),
            _ => true,
        }
    }

    /// Every broken line with initial direction `v`, ignoring the endpoint.
    pub fn all_lines(&self, v: V2) -> Result<Arc<Vec<BrokenLine>>> {
        if let Some(l) = self.lines.lock().unwrap().get(&v) {
            return Ok(l.clone());
        }
        let d = &self.diagram;
        let g = d.grading.clone();
        let mut out = Vec::new();
        let start = BrokenLine { initial: v, bends: vec![], mono: self.lift(v), coeff: q(1) };
        let mut stack = vec![start];
        while let Some(line) = stack.pop() {
            let vel = line.velocity();
            if vel != [0, 0] {
                for ray in d.rays.values() {
                    let w = ray.dir;
                    let ok = match line.bends.last() {
                        None => det(w, v) != 0,
                        Some(b) => in_convex_cone(w, b.wall, vel),
                    };
                    if !ok || !self.wall_allowed(w) {
                        continue;
                    }
                    let n = ray.normal(vel)?;
                    let e = n[0] * line.mono.dir[0] + n[1] * line.mono.dir[1];
                    if e <= 0 {
                        return Err(Error::Consistency("bend exponent not positive".into()));
                    }
                    let base_grade = g.grade(&line.mono);
                    let pow = d.ray_power(ray, e)?;
                    for (t, a) in pow.terms() {
                        if t.is_zero() || base_grade + g.grade(t) >= d.order {
                            continue;
                        }
                        let mut next = line.clone();
                        next.bends.push(Bend { wall: w, term: t.clone(), coeff: a.clone() });
                        next.mono = line.mono.add(t);
                        next.coeff = &line.coeff * a;
                        stack.push(next);
                    }
                }
            }
            out.push(line);
        }
        out.sort_by(|a, b| (a.bends.len(), &a.mono, bend_key(a)).cmp(&(b.bends.len(), &b.mono, bend_key(b))));
        let out = Arc::new(out);
        self.lines.lock().unwrap().insert(v, out.clone());
        Ok(out)
    }

    /// Broken lines from direction `v` ending at `z`.
    pub fn enumerate(&self, v: V2, z: &Endpoint) -> Result<Vec<BrokenLine>> {
        Ok(self.all_lines(v)?.iter().filter(|l| l.ends_at(z)).cloned().collect())
    }

    /// Local expansion of ϑ_v at z: Σ coeff·z^{m(0)} over lines ending at z.
    pub fn theta_at(&self, v: V2, z: &Endpoint) -> Result<BTreeMap<Exponent, Q>> {
        let mut out = BTreeMap::new();
        for l in self.enumerate(v, z)? {
            *out.entry(l.mono.clone()).or_insert_with(|| q(0)) += l.coeff.clone();
        }
        out.retain(|_, c| *c != q(0));
        Ok(out)
    }

    /// Structure constants: ϑ_P ϑ_Q = Σ_R c_R ϑ_R, with the endpoint for R
    /// produced by `endpoint`.
    pub fn product_with<F: Fn(V2) -> Endpoint + Sync>(
        &self,
        p: V2,
        qv: V2,
        endpoint: F,
    ) -> Result<BTreeMap<V2, ClassPoly>> {
        let (lp, lq) = rayon::join(|| self.all_lines(p), || self.all_lines(qv));
        let (lp, lq) = (lp?, lq?);
        let g = self.grading().clone();
        let order = self.order();
        let (gp, gq) = (group_by_dir(&lp), group_by_dir(&lq));
        let mut candidates: Vec<V2> = Vec::new();
        for a in gp.keys() {
            for b in gq.keys() {
                candidates.push([a[0] + b[0], a[1] + b[1]]);
            }
        }
        candidates.sort();
        candidates.dedup();
        let results: Vec<(V2, ClassPoly)> = candidates
            .par_iter()
            .map(|&r| {
                let z = endpoint(r);
                let shift = self.phi.eval(r);
                let mut poly = ClassPoly::new();
                for (a, ls) in &gp {
                    let b = [r[0] - a[0], r[1] - a[1]];
                    let Some(ms) = gq.get(&b) else { continue };
                    let l1: Vec<&&BrokenLine> = ls.iter().filter(|l| l.ends_at(&z)).collect();
                    if l1.is_empty() {
                        continue;
                    }
                    let l2: Vec<&&BrokenLine> = ms.iter().filter(|l| l.ends_at(&z)).collect();
                    for x in &l1 {
                        for y in &l2 {
                            let c = lattice::sub(&lattice::add(&x.mono.cls, &y.mono.cls), &shift);
                            if class_grade(&g, &c) < order {
                                poly_add_term(&mut poly, c, &x.coeff * &y.coeff);
                            }
                        }
                    }
                }
                (r, poly)
            })
            .collect();
        Ok(results.into_iter().filter(|(_, p)| !p.is_empty()).collect())
    }

    /// ϑ_P ϑ_Q with the default endpoint perturbation.
    pub fn product(&self, p: V2, qv: V2) -> Result<BTreeMap<V2, ClassPoly>> {
        self.product_with(p, qv, Endpoint::near)
    }

    /// Multiply an element Σ_R a_R ϑ_R by ϑ_Q.
    pub fn multiply(&self, x: &BTreeMap<V2, ClassPoly>, qv: V2) -> Result<BTreeMap<V2, ClassPoly>> {
        let g = self.grading().clone();
        let mut out: BTreeMap<V2, ClassPoly> = BTreeMap::new();
        for (r, a) in x {
            let prod = if *r == [0, 0] {
                BTreeMap::from([(qv, BTreeMap::from([(vec![0; g.rank()], q(1))]))])
            } else {
                self.product(*r, qv)?
            };
            for (s, b) in prod {
                let c = poly_mul(a, &b, &g, self.order());
                let slot = out.entry(s).or_default();
                for (k, v) in c {
                    poly_add_term(slot, k, v);
                }
            }
        }
        out.retain(|_, p| !p.is_empty());
        Ok(out)
    }
}

fn group_by_dir(ls: &[BrokenLine]) -> BTreeMap<V2, Vec<&BrokenLine>> {
    let mut m: BTreeMap<V2, Vec<&BrokenLine>> = BTreeMap::new();
    for l in ls {
        if l.velocity() != [0, 0] {
            m.entry(l.mono.dir).or_default().push(l);
        }
    }
    m
}

fn bend_key(l: &BrokenLine) -> Vec<(V2, Exponent)> {
    l.bends.iter().map(|b| (b.wall, b.term.clone())).collect()
}

/// JSON rendering of an element Σ_R a_R ϑ_R.
pub fn expansion_json(x: &BTreeMap<V2, ClassPoly>, labels: &[String]) -> Value {
    Value::Array(
        x.iter()
            .map(|(r, p)| {
                json!({
                    "theta": r,
                    "coefficient": poly_text(p, labels),
                })
            })
            .collect(),
    )
}
