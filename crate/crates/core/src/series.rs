//! Truncated power series over the monoid algebra with exponents
//! (direction in Z², curve class) and exact rational coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Exponent of a monomial: a tangent direction and a curve class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Exponent {
    pub dir: [i64; 2],
    pub cls: Vec<i64>,
}

impl Exponent {
    pub fn new(dir: [i64; 2], cls: Vec<i64>) -> Self {
        Exponent { dir, cls }
    }

    pub fn zero(rank: usize) -> Self {
        Exponent { dir: [0, 0], cls: vec![0; rank] }
    }

    pub fn is_zero(&self) -> bool {
        self.dir == [0, 0] && self.cls.iter().all(|c| *c == 0)
    }

    pub fn add(&self, o: &Exponent) -> Exponent {
        Exponent {
            dir: [self.dir[0] + o.dir[0], self.dir[1] + o.dir[1]],
            cls: self.cls.iter().zip(&o.cls).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn neg(&self) -> Exponent {
        Exponent { dir: [-self.dir[0], -self.dir[1]], cls: self.cls.iter().map(|c| -c).collect() }
    }

    /// Canonical text `z^(a,b) * t^[v0,...,vk]`.
    pub fn text(&self) -> String {
        let cls: Vec<String> = self.cls.iter().map(|c| c.to_string()).collect();
        format!("z^({},{}) * t^[{}]", self.dir[0], self.dir[1], cls.join(","))
    }
}

/// A linear functional on the class part used to truncate series.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Grading {
    pub name: String,
    pub weights: Vec<i64>,
}

impl Grading {
    pub fn new(name: &str, weights: Vec<i64>) -> Arc<Grading> {
        Arc::new(Grading { name: name.to_string(), weights })
    }

    pub fn grade(&self, e: &Exponent) -> i64 {
        self.weights.iter().zip(&e.cls).map(|(w, c)| w * c).sum()
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }
}

/// Render a rational as `p` or `p/q`.
pub fn q_text(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Canonical term text `c * z^(a,b) * t^[v0,...,vk]`.
pub fn term_text(e: &Exponent, c: &Q) -> String {
    format!("{} * {}", q_text(c), e.text())
}

/// Truncated series: all stored terms have grade < `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    terms: BTreeMap<Exponent, Q>,
    order: i64,
    grading: Arc<Grading>,
}

impl Series {
    pub fn zero(grading: &Arc<Grading>, order: i64) -> Self {
        Series { terms: BTreeMap::new(), order, grading: grading.clone() }
    }

    pub fn one(grading: &Arc<Grading>, order: i64) -> Self {
        Self::monomial(grading, order, Exponent::zero(grading.rank()), q(1))
    }

    pub fn monomial(grading: &Arc<Grading>, order: i64, e: Exponent, c: Q) -> Self {
        let mut s = Self::zero(grading, order);
        s.add_term(e, c);
        s
    }

    pub fn from_terms<I: IntoIterator<Item = (Exponent, Q)>>(grading: &Arc<Grading>, order: i64, it: I) -> Self {
        let mut s = Self::zero(grading, order);
        for (e, c) in it {
            s.add_term(e, c);
        }
        s
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn grading(&self) -> &Arc<Grading> {
        &self.grading
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, Q> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms.iter().next().map(|(e, c)| e.is_zero() && c.is_one()).unwrap_or(false)
    }

    pub fn coeff(&self, e: &Exponent) -> Q {
        self.terms.get(e).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant(&self) -> Q {
        self.coeff(&Exponent::zero(self.grading.rank()))
    }

    /// Add `c·z^e`, dropping it if its grade is at least the order.
    pub fn add_term(&mut self, e: Exponent, c: Q) {
        if c.is_zero() || self.grading.grade(&e) >= self.order {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check(&self, o: &Series) -> Result<()> {
        if self.grading != o.grading || self.order != o.order {
            return Err(Error::Usage(format!(
                "series mismatch: {}@{} vs {}@{}",
                self.grading.name, self.order, o.grading.name, o.order
            )));
        }
        Ok(())
    }

    /// Same terms, truncated to a (not larger) order.
    pub fn truncate(&self, order: i64) -> Series {
        let mut s = Series::zero(&self.grading, order);
        for (e, c) in &self.terms {
            s.add_term(e.clone(), c.clone());
        }
        s
    }

    /// Terms of a given grade.
    pub fn graded_part(&self, g: i64) -> Vec<(Exponent, Q)> {
        self.terms
            .iter()
            .filter(|(e, _)| self.grading.grade(e) == g)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect()
    }

    pub fn min_grade(&self) -> Option<i64> {
        self.terms.keys().map(|e| self.grading.grade(e)).min()
    }

    pub fn add(&self, o: &Series) -> Result<Series> {
        self.check(o)?;
        let mut s = self.clone();
        for (e, c) in &o.terms {
            s.add_term(e.clone(), c.clone());
        }
        Ok(s)
    }

    pub fn sub(&self, o: &Series) -> Result<Series> {
        self.add(&o.scale(&q(-1)))
    }

    pub fn scale(&self, c: &Q) -> Series {
        let mut s = Series::zero(&self.grading, self.order);
        for (e, d) in &self.terms {
            s.add_term(e.clone(), d * c);
        }
        s
    }

    /// Multiply by a single monomial.
    pub fn shift(&self, e: &Exponent, c: &Q) -> Series {
        let mut s = Series::zero(&self.grading, self.order);
        for (f, d) in &self.terms {
            s.add_term(f.add(e), d * c);
        }
        s
    }

    pub fn mul(&self, o: &Series) -> Result<Series> {
        self.check(o)?;
        Ok(self.mul_unchecked(o))
    }

    fn mul_unchecked(&self, o: &Series) -> Series {
        let g = &self.grading;
        let mut right: Vec<(i64, &Exponent, &Q)> = o.terms.iter().map(|(e, c)| (g.grade(e), e, c)).collect();
        right.sort_by_key(|t| t.0);
        let mut acc: HashMap<Exponent, Q> = HashMap::new();
        for (e1, c1) in &self.terms {
            let g1 = g.grade(e1);
            for (g2, e2, c2) in &right {
                if g1 + g2 >= self.order {
                    break;
                }
                let e = e1.add(e2);
                let p = c1 * *c2;
                match acc.get_mut(&e) {
                    Some(v) => *v += p,
                    None => {
                        acc.insert(e, p);
                    }
                }
            }
        }
        let mut s = Series::zero(g, self.order);
        s.terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        s
    }

    /// Split into (constant term, remainder) and check the remainder is
    /// nilpotent under the truncation (all its grades positive).
    fn unit_split(&self) -> Result<Series> {
        if !self.constant().is_one() {
            return Err(Error::Inversion(format!("constant term {} is not 1", q_text(&self.constant()))));
        }
        let mut u = self.clone();
        u.terms.remove(&Exponent::zero(self.grading.rank()));
        if let Some(m) = u.min_grade() {
            if m <= 0 {
                return Err(Error::Inversion("non-constant term of non-positive grade".into()));
            }
        }
        Ok(u)
    }

    /// Inverse of a series with constant term 1 by geometric expansion.
    pub fn inverse(&self) -> Result<Series> {
        let u = self.unit_split()?;
        let neg_u = u.scale(&q(-1));
        let mut result = Series::one(&self.grading, self.order);
        let mut power = Series::one(&self.grading, self.order);
        loop {
            power = power.mul_unchecked(&neg_u);
            if power.is_empty() {
                break;
            }
            result = result.add(&power)?;
        }
        Ok(result)
    }

    pub fn pow(&self, n: i64) -> Result<Series> {
        if n < 0 {
            return self.inverse()?.pow(-n);
        }
        let mut result = Series::one(&self.grading, self.order);
        let mut base = self.clone();
        let mut k = n as u64;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul_unchecked(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        Ok(result)
    }

    /// exp of a series with zero constant term and positive grades.
    pub fn exp(&self) -> Result<Series> {
        if !self.constant().is_zero() {
            return Err(Error::Domain("exp needs a zero constant term".into()));
        }
        if let Some(m) = self.min_grade() {
            if m <= 0 {
                return Err(Error::Domain("exp needs positive grades".into()));
            }
        }
        let mut result = Series::one(&self.grading, self.order);
        let mut term = Series::one(&self.grading, self.order);
        let mut k = 1i64;
        loop {
            term = term.mul_unchecked(self).scale(&q_frac(1, k));
            if term.is_empty() {
                break;
            }
            result = result.add(&term)?;
            k += 1;
        }
        Ok(result)
    }

    /// log of a series with constant term 1.
    pub fn log(&self) -> Result<Series> {
        let u = self.unit_split()?;
        let mut result = Series::zero(&self.grading, self.order);
        let mut power = Series::one(&self.grading, self.order);
        let mut k = 1i64;
        loop {
            power = power.mul_unchecked(&u);
            if power.is_empty() {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            result = result.add(&power.scale(&q_frac(sign, k)))?;
            k += 1;
        }
        Ok(result)
    }

    /// Canonical term texts in key order.
    pub fn term_texts(&self) -> Vec<String> {
        self.terms.iter().map(|(e, c)| term_text(e, c)).collect()
    }

    /// True when every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Map each class vector through `f`, keeping the same grading object.
    pub fn map_exponents<F: Fn(&Exponent) -> Exponent>(&self, f: F) -> Series {
        let mut s = Series::zero(&self.grading, self.order);
        for (e, c) in &self.terms {
            s.add_term(f(e), c.clone());
        }
        s
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", term_text(e, c))?;
        }
        Ok(())
    }
}

/// Shared memo of integer powers keyed by (series identity, exponent).
#[derive(Debug)]
pub struct PowerCache {
    enabled: bool,
    map: Mutex<HashMap<(u64, i64), Arc<Series>>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

/// Hit and miss counters of a [`PowerCache`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
}

impl Default for PowerCache {
    fn default() -> Self {
        Self::new(true)
    }
}

impl PowerCache {
    pub fn new(enabled: bool) -> Self {
        PowerCache { enabled, map: Mutex::new(HashMap::new()), hits: AtomicU64::new(0), misses: AtomicU64::new(0) }
    }

    pub fn enabled(&self) -> bool {
        self.enabled
    }

    /// `base^n`, looked up under `key`. Values are deterministic, so a race
    /// between two threads computing the same entry only duplicates work.
    pub fn pow(&self, key: u64, base: &Series, n: i64) -> Result<Arc<Series>> {
        if !self.enabled {
            return Ok(Arc::new(base.pow(n)?));
        }
        if let Some(s) = self.map.lock().unwrap().get(&(key, n)) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(s.clone());
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let s = Arc::new(base.pow(n)?);
        self.map.lock().unwrap().insert((key, n), s.clone());
        Ok(s)
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats { hits: self.hits.load(Ordering::Relaxed), misses: self.misses.load(Ordering::Relaxed) }
    }

    /// Drop all entries (used when the underlying series change).
    pub fn invalidate(&self, key: u64) {
        self.map.lock().unwrap().retain(|k, _| k.0 != key);
    }
}

/// Absolute value helper for rationals used in reports.
pub fn q_abs(c: &Q) -> Q {
    c.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g2() -> Arc<Grading> {
        Grading::new("test", vec![1, 1])
    }

    fn x(g: &Arc<Grading>, ord: i64) -> Series {
        Series::monomial(g, ord, Exponent::new([1, 0], vec![1, 0]), q(1))
    }

    fn y(g: &Arc<Grading>, ord: i64) -> Series {
        Series::monomial(g, ord, Exponent::new([0, 1], vec![0, 1]), q(1))
    }

    #[test]
    fn product_of_binomials() {
        let g = g2();
        let one = Series::one(&g, 3);
        let a = one.add(&x(&g, 3)).unwrap();
        let b = one.add(&y(&g, 3)).unwrap();
        let p = a.mul(&b).unwrap();
        assert_eq!(p.len(), 4);
        let p2 = a.truncate(2).mul(&b.truncate(2)).unwrap();
        assert_eq!(p2.len(), 3);
    }

    #[test]
    fn inverse_and_powers() {
        let g = g2();
        let a = Series::one(&g, 5).add(&x(&g, 5)).unwrap();
        let inv = a.pow(-1).unwrap();
        assert_eq!(inv.len(), 5);
        assert!(a.mul(&inv).unwrap().is_one());
        assert!(a.pow(0).unwrap().is_one());
        let two = Series::one(&g, 5).scale(&q(2));
        assert!(matches!(two.inverse(), Err(Error::Inversion(_))));
    }

    #[test]
    fn exp_log() {
        let g = g2();
        let z = Series::zero(&g, 3);
        assert!(z.exp().unwrap().is_one());
        let e = x(&g, 3).exp().unwrap();
        assert_eq!(e.coeff(&Exponent::new([2, 0], vec![2, 0])), q_frac(1, 2));
        assert_eq!(e.len(), 3);
        let a = Series::one(&g, 6).add(&x(&g, 6)).unwrap().add(&y(&g, 6).scale(&q(3))).unwrap();
        assert_eq!(a.log().unwrap().exp().unwrap(), a);
        assert!(Series::one(&g, 3).exp().is_err());
    }

    #[test]
    fn mismatch_is_usage_error() {
        let g = g2();
        assert!(matches!(x(&g, 3).mul(&x(&g, 4)), Err(Error::Usage(_))));
    }

    #[test]
    fn canonical_text() {
        let e = Exponent::new([1, -2], vec![0, 1, -1]);
        assert_eq!(term_text(&e, &q(-3)), "-3 * z^(1,-2) * t^[0,1,-1]");
        assert_eq!(term_text(&e, &q_frac(1, 2)), "1/2 * z^(1,-2) * t^[0,1,-1]");
    }

    #[test]
    fn cache_counts() {
        let g = g2();
        let a = Series::one(&g, 4).add(&x(&g, 4)).unwrap();
        let c = PowerCache::new(true);
        assert_eq!(c.stats().hits, 0);
        c.pow(1, &a, -2).unwrap();
        c.pow(1, &a, -2).unwrap();
        assert!(c.stats().hits >= 1);
        let d = PowerCache::new(false);
        d.pow(1, &a, -2).unwrap();
        d.pow(1, &a, -2).unwrap();
        assert_eq!(d.stats().hits, 0);
    }
}
