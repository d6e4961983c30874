//! Gröbner bases (Buchberger, grevlex), quotient dimensions and critical
//! ideals of a potential restricted to an affine variety.

use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poly::{Mono, Poly};
use crate::series::{q, Q};

/// The only monomial order used; reported in output metadata.
pub const MONOMIAL_ORDER: &str = "grevlex";

/// Degree reverse lexicographic comparison (variable 0 is the largest).
pub fn grevlex(a: &[i32], b: &[i32]) -> Ordering {
    let da: i32 = a.iter().sum();
    let db: i32 = b.iter().sum();
    if da != db {
        return da.cmp(&db);
    }
    for i in (0..a.len()).rev() {
        if a[i] != b[i] {
            return b[i].cmp(&a[i]);
        }
    }
    Ordering::Equal
}

/// Polynomial as a grevlex-descending term list.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Sorted {
    terms: Vec<(Mono, Q)>,
}

impl Sorted {
    fn from_poly(p: &Poly) -> Result<Self> {
        let mut terms: Vec<(Mono, Q)> = p.terms().iter().map(|(m, c)| (m.clone(), c.clone())).collect();
        if terms.iter().any(|(m, _)| m.iter().any(|e| *e < 0)) {
            return Err(Error::Domain("Gröbner kernel needs polynomial (non-Laurent) input".into()));
        }
        terms.sort_by(|a, b| grevlex(&b.0, &a.0));
        Ok(Sorted { terms })
    }

    fn to_poly(&self, vars: &Arc<Vec<String>>) -> Poly {
        let mut p = Poly::zero(vars);
        for (m, c) in &self.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }

    fn lead(&self) -> &(Mono, Q) {
        &self.terms[0]
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn monic(mut self) -> Self {
        if let Some((_, c)) = self.terms.first() {
            let inv = c.recip();
            for t in &mut self.terms {
                t.1 = &t.1 * &inv;
            }
        }
        self
    }

    /// self − c · x^m · g, merging sorted term lists.
    fn sub_scaled(&self, c: &Q, m: &[i32], g: &Sorted) -> Sorted {
        let mut out = Vec::with_capacity(self.terms.len() + g.terms.len());
        let shifted = g.terms.iter().map(|(e, d)| (e.iter().zip(m).map(|(a, b)| a + b).collect::<Mono>(), -(c * d)));
        let mut a = self.terms.iter().cloned().peekable();
        let mut b = shifted.peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some(x), Some(y)) => match grevlex(&x.0, &y.0) {
                    Ordering::Greater => out.push(a.next().unwrap()),
                    Ordering::Less => out.push(b.next().unwrap()),
                    Ordering::Equal => {
                        let (m1, c1) = a.next().unwrap();
                        let (_, c2) = b.next().unwrap();
                        let s = c1 + c2;
                        if !s.is_zero() {
                            out.push((m1, s));
                        }
                    }
                },
                (Some(_), None) => out.push(a.next().unwrap()),
                (None, Some(_)) => out.push(b.next().unwrap()),
                (None, None) => break,
            }
        }
        Sorted { terms: out }
    }
}

fn divides(a: &[i32], b: &[i32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm(a: &[i32], b: &[i32]) -> Mono {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn mono_sub(a: &[i32], b: &[i32]) -> Mono {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Full reduction of p modulo the list g.
fn reduce(p: &Sorted, g: &[Sorted]) -> Sorted {
    let mut p = p.clone();
    let mut rem: Vec<(Mono, Q)> = Vec::new();
    while !p.is_zero() {
        let (lm, lc) = p.lead().clone();
        if let Some(h) = g.iter().find(|h| divides(&h.lead().0, &lm)) {
            let (hm, hc) = h.lead();
            p = p.sub_scaled(&(&lc / hc), &mono_sub(&lm, hm), h);
        } else {
            rem.push(p.terms.remove(0));
        }
    }
    Sorted { terms: rem }
}

fn s_poly(f: &Sorted, g: &Sorted) -> Sorted {
    let (fm, fc) = f.lead();
    let (gm, gc) = g.lead();
    let l = lcm(fm, gm);
    let a = Sorted { terms: f.terms.iter().map(|(m, c)| (m.iter().zip(&mono_sub(&l, fm)).map(|(x, y)| x + y).collect(), c / fc)).collect() };
    a.sub_scaled(&gc.recip(), &mono_sub(&l, gm), g)
}

/// Ideal with a lazily computed reduced Gröbner basis.
#[derive(Clone, Debug)]
pub struct Ideal {
    pub vars: Arc<Vec<String>>,
    pub generators: Vec<Poly>,
    basis: Option<Vec<Poly>>,
}

impl Ideal {
    pub fn new(vars: &Arc<Vec<String>>, generators: Vec<Poly>) -> Result<Self> {
        let generators = generators.into_iter().map(|g| g.rebase(vars)).collect::<Result<Vec<_>>>()?;
        Ok(Ideal { vars: vars.clone(), generators, basis: None })
    }

    /// Reduced Gröbner basis (monic, sorted by leading monomial).
    pub fn groebner(&mut self) -> Result<&[Poly]> {
        if self.basis.is_none() {
            self.basis = Some(groebner_basis(&self.vars, &self.generators)?);
        }
        Ok(self.basis.as_deref().unwrap())
    }

    /// Normal form of p modulo the ideal.
    pub fn normal_form(&mut self, p: &Poly) -> Result<Poly> {
        let vars = self.vars.clone();
        let g: Vec<Sorted> = self.groebner()?.iter().map(Sorted::from_poly).collect::<Result<_>>()?;
        Ok(reduce(&Sorted::from_poly(&p.rebase(&vars)?)?, &g).to_poly(&vars))
    }

    pub fn leading_monomials(&mut self) -> Result<Vec<Mono>> {
        let g = self.groebner()?;
        g.iter().map(|p| Ok(Sorted::from_poly(p)?.lead().0.clone())).collect()
    }

    /// Standard monomials, or None if there are infinitely many.
    pub fn staircase(&mut self) -> Result<Option<Vec<Mono>>> {
        let n = self.vars.len();
        let leads = self.leading_monomials()?;
        if leads.iter().any(|m| m.iter().all(|e| *e == 0)) {
            return Ok(Some(Vec::new()));
        }
        let mut bound = vec![0i32; n];
        for (i, b) in bound.iter_mut().enumerate() {
            let pure = leads.iter().filter(|m| m.iter().enumerate().all(|(j, e)| j == i || *e == 0)).map(|m| m[i]).min();
            match pure {
                Some(d) => *b = d,
                None => return Ok(None),
            }
        }
        let mut out = Vec::new();
        let mut cur = vec![0i32; n];
        loop {
            if !leads.iter().any(|l| divides(l, &cur)) {
                out.push(cur.clone());
            }
            let mut i = 0;
            loop {
                if i == n {
                    out.sort_by(|a, b| grevlex(a, b));
                    return Ok(Some(out));
                }
                cur[i] += 1;
                if cur[i] < bound[i] {
                    break;
                }
                cur[i] = 0;
                i += 1;
            }
        }
    }

    /// Vector-space dimension of the quotient ring, None when infinite.
    pub fn quotient_dimension(&mut self) -> Result<Option<usize>> {
        Ok(self.staircase()?.map(|s| s.len()))
    }
}

/// Buchberger's algorithm with the product and chain criteria, followed by
/// inter-reduction.
pub fn groebner_basis(vars: &Arc<Vec<String>>, gens: &[Poly]) -> Result<Vec<Poly>> {
    let mut g: Vec<Sorted> = Vec::new();
    for p in gens {
        let s = Sorted::from_poly(&p.rebase(vars)?)?;
        if !s.is_zero() {
            g.push(s.monic());
        }
    }
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for j in 0..g.len() {
        for i in 0..j {
            pairs.insert((i, j));
        }
    }
    let mut done: BTreeSet<(usize, usize)> = BTreeSet::new();
    while let Some(&(i, j)) = pairs.iter().min_by(|a, b| {
        let la = lcm(&g[a.0].lead().0, &g[a.1].lead().0);
        let lb = lcm(&g[b.0].lead().0, &g[b.1].lead().0);
        grevlex(&la, &lb).then(a.cmp(b))
    }) {
        pairs.remove(&(i, j));
        done.insert((i, j));
        let (li, lj) = (&g[i].lead().0, &g[j].lead().0);
        let l = lcm(li, lj);
        // Product criterion: coprime leading monomials.
        if li.iter().zip(lj).all(|(a, b)| *a == 0 || *b == 0) {
            continue;
        }
        // Chain criterion.
        let chain = (0..g.len()).any(|k| {
            k != i && k != j && divides(&g[k].lead().0, &l) && {
                let p1 = (i.min(k), i.max(k));
                let p2 = (j.min(k), j.max(k));
                !pairs.contains(&p1) && !pairs.contains(&p2)
            }
        });
        if chain {
            continue;
        }
        let r = reduce(&s_poly(&g[i], &g[j]), &g);
        if !r.is_zero() {
            let r = r.monic();
            let n = g.len();
            g.push(r);
            for k in 0..n {
                pairs.insert((k, n));
            }
        }
    }
    // Minimize then inter-reduce.
    let mut keep: Vec<Sorted> = Vec::new();
    for (i, p) in g.iter().enumerate() {
        let lm = &p.lead().0;
        let redundant = g.iter().enumerate().any(|(j, h)| {
            j != i && divides(&h.lead().0, lm) && (h.lead().0 != *lm || j < i)
        });
        if !redundant {
            keep.push(p.clone());
        }
    }
    let mut reduced = Vec::with_capacity(keep.len());
    for i in 0..keep.len() {
        let others: Vec<Sorted> = keep.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p.clone()).collect();
        let head = Sorted { terms: vec![keep[i].terms[0].clone()] };
        let tail = Sorted { terms: keep[i].terms[1..].to_vec() };
        let t = reduce(&tail, &others);
        let mut terms = head.terms;
        terms.extend(t.terms);
        reduced.push(Sorted { terms }.monic());
    }
    reduced.sort_by(|a, b| grevlex(&a.lead().0, &b.lead().0));
    Ok(reduced.iter().map(|s| s.to_poly(vars)).collect())
}

/// Determinant of a square matrix of polynomials (Laplace expansion).
pub fn determinant(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let vars = m[0][0].vars().clone();
    let mut acc = Poly::zero(&vars);
    for (c, entry) in m[0].iter().enumerate() {
        if entry.is_zero() {
            continue;
        }
        let minor: Vec<Vec<Poly>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, p)| p.clone()).collect()).collect();
        let term = entry.mul(&determinant(&minor));
        acc = if c % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Critical ideal of W on the complete intersection cut out by `eqs`: the
/// equations plus all maximal minors of the Jacobian matrix of (eqs, W).
pub fn critical_ideal(vars: &Arc<Vec<String>>, eqs: &[Poly], w: &Poly) -> Result<Ideal> {
    let rows = eqs.len() + 1;
    if rows > vars.len() {
        return Err(Error::Dimension(format!(
            "{rows} gradient rows need at least {rows} variables, have {}",
            vars.len()
        )));
    }
    critical_ideal_codim(vars, eqs, w, eqs.len())
}

/// Critical ideal of W on a variety of codimension `codim` cut out by `eqs`
/// (not necessarily a complete intersection): the equations plus every
/// (codim+1)-minor built from ∇W and `codim` of the equation gradients.
pub fn critical_ideal_codim(vars: &Arc<Vec<String>>, eqs: &[Poly], w: &Poly, codim: usize) -> Result<Ideal> {
    let n = vars.len();
    if codim + 1 > n || codim > eqs.len() {
        return Err(Error::Dimension(format!("codimension {codim} impossible with {} equations in {n} variables", eqs.len())));
    }
    let eqs: Vec<Poly> = eqs.iter().map(|e| e.rebase(vars)).collect::<Result<_>>()?;
    let w = w.rebase(vars)?;
    let grad = |f: &Poly| -> Vec<Poly> { (0..n).map(|i| f.derivative(i)).collect() };
    let eq_grads: Vec<Vec<Poly>> = eqs.iter().map(grad).collect();
    let w_grad = grad(&w);
    let mut gens: Vec<Poly> = eqs.clone();
    let mut seen = BTreeSet::new();
    for rows in combinations(eqs.len(), codim) {
        for cols in combinations(n, codim + 1) {
            let mut m: Vec<Vec<Poly>> = rows.iter().map(|&r| cols.iter().map(|&c| eq_grads[r][c].clone()).collect()).collect();
            m.push(cols.iter().map(|&c| w_grad[c].clone()).collect());
            let d = determinant(&m);
            if !d.is_zero() && seen.insert(d.to_string()) {
                gens.push(d);
            }
        }
    }
    Ideal::new(vars, gens)
}

/// Critical ideal of a Laurent potential on the torus: adds a variable `u`
/// with u·x1^a1·…·xn^an = 1 (ai the largest denominator power, at least 1)
/// and rewrites W as a polynomial in (x, u).
pub fn laurent_critical_ideal(eqs: &[Poly], w: &Poly) -> Result<Ideal> {
    let n = w.nvars();
    let mut den = vec![1i32; n];
    for m in w.terms().keys().chain(eqs.iter().flat_map(|e| e.terms().keys())) {
        for (d, e) in den.iter_mut().zip(m) {
            *d = (*d).max(-e);
        }
    }
    let mut names: Vec<String> = w.vars().to_vec();
    let mut u = "u".to_string();
    while names.contains(&u) {
        u.push('_');
    }
    names.push(u);
    let vars = Arc::new(names);
    let clear = |p: &Poly| -> Poly {
        let mut out = Poly::zero(&vars);
        for (m, c) in p.terms() {
            // u^k x^(m + k·den) with the least k ≥ 0 clearing all negatives.
            let k = m.iter().zip(&den).map(|(e, d)| if *e < 0 { (-e + d - 1) / d } else { 0 }).max().unwrap_or(0);
            let mut e: Mono = m.iter().zip(&den).map(|(x, d)| x + k * d).collect();
            e.push(k);
            out.add_term(e, c.clone());
        }
        out
    };
    let mut sat: Mono = den.clone();
    sat.push(1);
    let mut g = Poly::monomial(&vars, sat, q(1));
    g.add_term(vec![0; n + 1], q(-1));
    let mut all_eqs: Vec<Poly> = eqs.iter().map(clear).collect();
    all_eqs.push(g);
    critical_ideal(&vars, &all_eqs, &clear(w))
}

/// Brute-force oracle: dimension of the quotient truncated to degree ≤ d,
/// via linear algebra on the span of monomial multiples of the generators.
pub fn truncated_quotient_dimension(ideal: &Ideal, d: i32) -> usize {
    let n = ideal.vars.len();
    let mut monos: Vec<Mono> = Vec::new();
    let mut cur = vec![0i32; n];
    fn rec(i: usize, left: i32, cur: &mut Mono, out: &mut Vec<Mono>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, d, &mut cur, &mut monos);
    let index: std::collections::HashMap<Mono, usize> = monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let deg = |m: &Mono| m.iter().sum::<i32>();
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for g in &ideal.generators {
        let gd = g.terms().keys().map(deg).max().unwrap_or(0);
        for m in monos.iter().filter(|m| deg(m) + gd <= d) {
            let mut row = vec![Q::zero(); monos.len()];
            for (e, c) in g.terms() {
                let t: Mono = e.iter().zip(m).map(|(a, b)| a + b).collect();
                row[index[&t]] = c.clone();
            }
            rows.push(row);
        }
    }
    monos.len() - rank(rows)
}

fn rank(mut rows: Vec<Vec<Q>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = Q::one() / &rows[r][c];
        let pivot: Vec<Q> = rows[r].iter().map(|x| x * &inv).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        rows[r] = pivot;
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::vars;

    #[test]
    fn square_ideal_has_dimension_four() {
        let v = vars(&["x", "y"]);
        let mut i = Ideal::new(&v, vec![Poly::parse(&v, "x^2").unwrap(), Poly::parse(&v, "y^2").unwrap()]).unwrap();
        assert_eq!(i.quotient_dimension().unwrap(), Some(4));
    }

    #[test]
    fn unconstrained_critical_points() {
        let v = vars(&["x", "y"]);
        let mut i = critical_ideal(&v, &[], &Poly::parse(&v, "x^2+y^2").unwrap()).unwrap();
        assert_eq!(i.generators, vec![Poly::parse(&v, "2x").unwrap(), Poly::parse(&v, "2y").unwrap()]);
        assert_eq!(i.quotient_dimension().unwrap(), Some(1));
    }

    #[test]
    fn projective_plane_potential() {
        let v = vars(&["x", "y"]);
        let mut i = laurent_critical_ideal(&[], &Poly::parse(&v, "x + y + 1/(x*y)").unwrap()).unwrap();
        assert_eq!(i.quotient_dimension().unwrap(), Some(3));
        let nf = i.normal_form(&Poly::parse(&i.vars.clone(), "x^3 - 1").unwrap()).unwrap();
        assert!(nf.is_zero());
        let nf = i.normal_form(&Poly::parse(&i.vars.clone(), "x - y").unwrap()).unwrap();
        assert!(nf.is_zero());
    }

    #[test]
    fn infinite_quotient() {
        let v = vars(&["x", "y"]);
        let mut i = Ideal::new(&v, vec![Poly::parse(&v, "x*y").unwrap()]).unwrap();
        assert_eq!(i.quotient_dimension().unwrap(), None);
    }

    #[test]
    fn basis_is_idempotent() {
        let v = vars(&["x", "y", "z"]);
        let gens = vec![
            Poly::parse(&v, "x^2 + y*z - 1").unwrap(),
            Poly::parse(&v, "x*y - z^2").unwrap(),
            Poly::parse(&v, "y^3 - x").unwrap(),
        ];
        let b = groebner_basis(&v, &gens).unwrap();
        assert_eq!(groebner_basis(&v, &b).unwrap(), b);
        let mut i = Ideal::new(&v, gens.clone()).unwrap();
        for g in &gens {
            assert!(i.normal_form(g).unwrap().is_zero());
        }
    }
}
