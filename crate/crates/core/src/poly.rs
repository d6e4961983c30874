//! Multivariate (Laurent) polynomials with exact rational coefficients over
//! a fixed list of named variables.

use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::series::{q, q_text, Q};

/// Exponent vector (negative entries allowed for Laurent monomials).
pub type Mono = Vec<i32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    vars: Arc<Vec<String>>,
    terms: BTreeMap<Mono, Q>,
}

/// Variable list helper.
pub fn vars(names: &[&str]) -> Arc<Vec<String>> {
    Arc::new(names.iter().map(|s| s.to_string()).collect())
}

impl Poly {
    pub fn zero(vars: &Arc<Vec<String>>) -> Self {
        Poly { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &Arc<Vec<String>>, c: Q) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(vec![0; vars.len()], c);
        p
    }

    pub fn var(vars: &Arc<Vec<String>>, name: &str) -> Result<Self> {
        let i = vars.iter().position(|v| v == name).ok_or_else(|| Error::Usage(format!("unknown variable '{name}'")))?;
        let mut m = vec![0; vars.len()];
        m[i] = 1;
        let mut p = Self::zero(vars);
        p.add_term(m, q(1));
        Ok(p)
    }

    pub fn monomial(vars: &Arc<Vec<String>>, m: Mono, c: Q) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(m, c);
        p
    }

    pub fn vars(&self) -> &Arc<Vec<String>> {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.vars.iter().position(|v| v == name).ok_or_else(|| Error::Usage(format!("unknown variable '{name}'")))
    }

    pub fn terms(&self) -> &BTreeMap<Mono, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Mono, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn coeff(&self, m: &Mono) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut p = self.clone();
        for (m, c) in &o.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let mut p = self.clone();
        for (m, c) in &o.terms {
            p.add_term(m.clone(), -c.clone());
        }
        p
    }

    pub fn scale(&self, c: &Q) -> Poly {
        let mut p = Poly::zero(&self.vars);
        for (m, d) in &self.terms {
            p.add_term(m.clone(), d * c);
        }
        p
    }

    pub fn neg(&self) -> Poly {
        self.scale(&q(-1))
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut p = Poly::zero(&self.vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m: Mono = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                p.add_term(m, c1 * c2);
            }
        }
        p
    }

    pub fn mul_mono(&self, m: &Mono, c: &Q) -> Poly {
        let mut p = Poly::zero(&self.vars);
        for (m1, c1) in &self.terms {
            let e: Mono = m1.iter().zip(m).map(|(a, b)| a + b).collect();
            p.add_term(e, c1 * c);
        }
        p
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut r = Poly::constant(&self.vars, q(1));
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }

    /// ∂/∂x_i (polynomial part; exponents may be negative).
    pub fn derivative(&self, i: usize) -> Poly {
        let mut p = Poly::zero(&self.vars);
        for (m, c) in &self.terms {
            if m[i] != 0 {
                let mut e = m.clone();
                e[i] -= 1;
                p.add_term(e, c * q(m[i] as i64));
            }
        }
        p
    }

    /// Substitute a polynomial for variable i (non-negative powers only).
    pub fn subs(&self, i: usize, val: &Poly) -> Result<Poly> {
        let mut out = Poly::zero(&self.vars);
        let mut cache: BTreeMap<i32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let k = m[i];
            if k < 0 {
                return Err(Error::Domain("cannot substitute into a negative power".into()));
            }
            let pw = cache.entry(k).or_insert_with(|| val.pow(k as u32)).clone();
            let mut rest = m.clone();
            rest[i] = 0;
            out = out.add(&pw.mul_mono(&rest, c));
        }
        Ok(out)
    }

    pub fn subs_name(&self, name: &str, val: &Poly) -> Result<Poly> {
        self.subs(self.var_index(name)?, val)
    }

    /// Substitute a constant for variable i (negative powers allowed).
    pub fn subs_const(&self, i: usize, v: &Q) -> Result<Poly> {
        let mut out = Poly::zero(&self.vars);
        for (m, c) in &self.terms {
            let k = m[i];
            if k < 0 && v.is_zero() {
                return Err(Error::Domain("division by zero in substitution".into()));
            }
            let f = if k >= 0 { num_traits::pow(v.clone(), k as usize) } else { num_traits::pow(v.recip(), (-k) as usize) };
            let mut rest = m.clone();
            rest[i] = 0;
            out.add_term(rest, c * f);
        }
        Ok(out)
    }

    pub fn degree_in(&self, i: usize) -> i32 {
        self.terms.keys().map(|m| m[i]).max().unwrap_or(0)
    }

    /// Coefficient of x_i^k as a polynomial in the remaining variables.
    pub fn coeff_in(&self, i: usize, k: i32) -> Poly {
        let mut p = Poly::zero(&self.vars);
        for (m, c) in &self.terms {
            if m[i] == k {
                let mut e = m.clone();
                e[i] = 0;
                p.add_term(e, c.clone());
            }
        }
        p
    }

    /// Same polynomial over a new variable list (names must exist there).
    pub fn rebase(&self, new_vars: &Arc<Vec<String>>) -> Result<Poly> {
        let idx: Vec<usize> = self
            .vars
            .iter()
            .map(|v| new_vars.iter().position(|w| w == v).ok_or_else(|| Error::Usage(format!("variable {v} missing"))))
            .collect::<Result<_>>()?;
        let mut p = Poly::zero(new_vars);
        for (m, c) in &self.terms {
            let mut e = vec![0; new_vars.len()];
            for (k, &j) in idx.iter().enumerate() {
                e[j] = m[k];
            }
            p.add_term(e, c.clone());
        }
        Ok(p)
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Parse an expression like `2*x^2*y - 3*(x+1)^2 + z^-1`.
    pub fn parse(vars: &Arc<Vec<String>>, text: &str) -> Result<Poly> {
        let toks = tokenize(text)?;
        let mut p = Parser { toks, pos: 0, vars: vars.clone() };
        let e = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(Error::Usage(format!("trailing input in '{text}'")));
        }
        Ok(e)
    }

    pub fn mono_text(&self, m: &Mono) -> String {
        let parts: Vec<String> = m
            .iter()
            .enumerate()
            .filter(|(_, e)| **e != 0)
            .map(|(i, e)| if *e == 1 { self.vars[i].clone() } else { format!("{}^{}", self.vars[i], e) })
            .collect();
        parts.join("*")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = *c < q(0);
            let mag = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let mt = self.mono_text(m);
            if mt.is_empty() {
                write!(f, "{}", q_text(&mag))?;
            } else if mag.is_one() {
                write!(f, "{mt}")?;
            } else {
                write!(f, "{}*{mt}", q_text(&mag))?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Q),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let t: String = cs[st..i].iter().collect();
            out.push(Tok::Num(t.parse::<Q>().map_err(|_| Error::Usage(format!("bad number {t}")))?));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*^()/".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Usage(format!("unexpected character '{c}' in '{s}'")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    vars: Arc<Vec<String>>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = Poly::zero(&self.vars);
        let mut sign = 1;
        if let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            if *c == '-' {
                sign = -1;
            }
            self.pos += 1;
        }
        loop {
            let t = self.term()?;
            acc = acc.add(&t.scale(&q(sign)));
            match self.peek() {
                Some(Tok::Op('+')) => sign = 1,
                Some(Tok::Op('-')) => sign = -1,
                _ => break,
            }
            self.pos += 1;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Op('*')) => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?);
                }
                Some(Tok::Op('/')) => {
                    self.pos += 1;
                    let d = self.factor()?;
                    if d.len() != 1 {
                        return Err(Error::Usage("can only divide by a monomial".into()));
                    }
                    let (m, c) = d.terms.iter().next().unwrap();
                    let inv: Mono = m.iter().map(|e| -e).collect();
                    acc = acc.mul_mono(&inv, &c.recip());
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Op('(')) => {
                    acc = acc.mul(&self.factor()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly> {
        let base = match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Poly::constant(&self.vars, n)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Poly::var(&self.vars, &name)?
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::Op(')')) {
                    return Err(Error::Usage("missing ')'".into()));
                }
                self.pos += 1;
                e
            }
            other => return Err(Error::Usage(format!("unexpected token {other:?}"))),
        };
        if self.peek() == Some(&Tok::Op('^')) {
            self.pos += 1;
            let mut neg = false;
            if self.peek() == Some(&Tok::Op('-')) {
                neg = true;
                self.pos += 1;
            }
            let n = match self.toks.get(self.pos).cloned() {
                Some(Tok::Num(n)) if n.is_integer() => {
                    self.pos += 1;
                    i32::try_from(n.to_integer()).map_err(|_| Error::Usage("exponent too large".into()))?
                }
                _ => return Err(Error::Usage("exponent must be an integer".into())),
            };
            if neg {
                if base.len() != 1 {
                    return Err(Error::Usage("negative powers only of monomials".into()));
                }
                let (m, c) = base.terms.iter().next().unwrap();
                let e: Mono = m.iter().map(|x| -x * n).collect();
                return Ok(Poly::monomial(&self.vars, e, num_traits::pow(c.recip(), n as usize)));
            }
            return Ok(base.pow(n as u32));
        }
        Ok(base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let v = vars(&["x", "y"]);
        let p = Poly::parse(&v, "(x+y)^2 - 2*x*y").unwrap();
        assert_eq!(p, Poly::parse(&v, "x^2 + y^2").unwrap());
        assert_eq!(Poly::parse(&v, "x + y + 1/(x*y)").unwrap().len(), 3);
        assert_eq!(Poly::parse(&v, "x*y^-1").unwrap().to_string(), "x*y^-1");
        assert!(Poly::parse(&v, "z").is_err());
    }

    #[test]
    fn substitution_and_derivative() {
        let v = vars(&["x", "y"]);
        let p = Poly::parse(&v, "x^3 + x*y").unwrap();
        let s = p.subs_name("x", &Poly::parse(&v, "y+1").unwrap()).unwrap();
        assert_eq!(s, Poly::parse(&v, "(y+1)^3 + (y+1)*y").unwrap());
        assert_eq!(p.derivative(0), Poly::parse(&v, "3x^2 + y").unwrap());
    }
}
