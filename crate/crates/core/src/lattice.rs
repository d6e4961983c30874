//! Curve classes on rational surfaces: the Picard basis (H, E1..Ek), the
//! intersection pairing, anticanonical degree and block-permutation orbits.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Integer coordinates of a curve class in the basis (H, E1, ..., Ek).
pub type CurveClass = Vec<i64>;

/// Boundary and basis data for a Looijenga pair (S, D).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceData {
    pub name: String,
    pub degree: i64,
    pub labels: Vec<String>,
    pub boundary: Vec<CurveClass>,
    #[serde(rename = "selfIntersections")]
    pub self_intersections: Vec<i64>,
}

/// ⟨a, b⟩ for the diagonal form diag(1, -1, ..., -1).
pub fn intersect(a: &[i64], b: &[i64]) -> Result<i64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::Dimension(format!(
            "cannot intersect classes of lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a[0] * b[0] - a[1..].iter().zip(&b[1..]).map(|(x, y)| x * y).sum::<i64>())
}

/// The anticanonical class 3H - ΣE_i in a basis with `k` exceptional curves.
pub fn anticanonical(k: usize) -> CurveClass {
    let mut v = vec![-1; k + 1];
    v[0] = 3;
    v
}

/// ⟨-K, a⟩.
pub fn anticanonical_degree(a: &[i64]) -> i64 {
    3 * a[0] + a[1..].iter().sum::<i64>()
}

pub fn add(a: &[i64], b: &[i64]) -> CurveClass {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[i64], b: &[i64]) -> CurveClass {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[i64], s: i64) -> CurveClass {
    a.iter().map(|x| x * s).collect()
}

/// Basis vector with a single 1 at `idx` (0 = H, i = E_i).
pub fn unit(len: usize, idx: usize) -> CurveClass {
    let mut v = vec![0; len];
    v[idx] = 1;
    v
}

/// Parse a class written like `2H-E1-E2-E3` or `H+E3` or `-E1` against labels.
pub fn parse_class(text: &str, labels: &[String]) -> Result<CurveClass> {
    let mut out = vec![0i64; labels.len()];
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() || s == "0" {
        return Ok(out);
    }
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let mut sign = 1;
        if bytes[i] == b'+' || bytes[i] == b'-' {
            if bytes[i] == b'-' {
                sign = -1;
            }
            i += 1;
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let coef: i64 = if start == i { 1 } else { s[start..i].parse().unwrap() };
        let lstart = i;
        while i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
            i += 1;
        }
        let label = &s[lstart..i];
        let idx = labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Spec(format!("unknown class label '{label}' in '{text}'")))?;
        out[idx] += sign * coef;
    }
    Ok(out)
}

/// Render a class as `2H-E1-E2`, using `0` for the zero class.
pub fn format_class(c: &[i64], labels: &[String]) -> String {
    let mut s = String::new();
    for (x, l) in c.iter().zip(labels) {
        if *x == 0 {
            continue;
        }
        if *x < 0 {
            s.push('-');
        } else if !s.is_empty() {
            s.push('+');
        }
        if x.abs() != 1 {
            s.push_str(&x.abs().to_string());
        }
        s.push_str(l);
    }
    if s.is_empty() {
        "0".into()
    } else {
        s
    }
}

/// Disjoint blocks of coordinate indices permuted independently.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symmetry {
    pub blocks: Vec<Vec<usize>>,
}

impl Symmetry {
    pub fn new(blocks: Vec<Vec<usize>>, len: usize) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for b in &blocks {
            for &i in b {
                if i == 0 || i >= len {
                    return Err(Error::Spec(format!("block index {i} out of range")));
                }
                if !seen.insert(i) {
                    return Err(Error::Spec(format!("index {i} appears in two blocks")));
                }
            }
        }
        Ok(Symmetry { blocks })
    }

    /// Order of the permutation group.
    pub fn group_order(&self) -> u64 {
        self.blocks.iter().map(|b| (1..=b.len() as u64).product::<u64>()).product()
    }
}

fn permutations_of(values: &[i64]) -> BTreeSet<Vec<i64>> {
    let mut out = BTreeSet::new();
    let mut v = values.to_vec();
    v.sort();
    loop {
        out.insert(v.clone());
        // next lexicographic permutation
        let n = v.len();
        if n < 2 {
            break;
        }
        let mut i = n - 1;
        while i > 0 && v[i - 1] >= v[i] {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        let mut j = n - 1;
        while v[j] <= v[i - 1] {
            j -= 1;
        }
        v.swap(i - 1, j);
        v[i..].reverse();
    }
    out
}

/// Full orbit of `template` under the block permutations, deduplicated and
/// sorted lexicographically.
pub fn orbit_expand(template: &[i64], sym: &Symmetry) -> Vec<CurveClass> {
    let mut orbit: BTreeSet<CurveClass> = BTreeSet::new();
    orbit.insert(template.to_vec());
    for block in &sym.blocks {
        let mut next = BTreeSet::new();
        for c in &orbit {
            let vals: Vec<i64> = block.iter().map(|&i| c[i]).collect();
            for p in permutations_of(&vals) {
                let mut d = c.clone();
                for (k, &i) in block.iter().enumerate() {
                    d[i] = p[k];
                }
                next.insert(d);
            }
        }
        orbit = next;
    }
    orbit.into_iter().collect()
}

impl SurfaceData {
    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    /// Check the structural invariants of a boundary cycle.
    pub fn validate(&self) -> Result<()> {
        let n = self.boundary.len();
        if n != self.self_intersections.len() {
            return Err(Error::Structure("boundary and self-intersection lists differ in length".into()));
        }
        if self.labels.first().map(|s| s.as_str()) != Some("H") {
            return Err(Error::Structure("first basis label must be H".into()));
        }
        for c in &self.boundary {
            if c.len() != self.rank() {
                return Err(Error::Dimension("boundary class has wrong length".into()));
            }
        }
        let sum = self.boundary.iter().fold(vec![0; self.rank()], |a, b| add(&a, b));
        if sum != anticanonical(self.rank() - 1) {
            return Err(Error::Structure(format!(
                "boundary does not sum to -K: got {}",
                format_class(&sum, &self.labels)
            )));
        }
        for (i, c) in self.boundary.iter().enumerate() {
            if intersect(c, c)? != self.self_intersections[i] {
                return Err(Error::Structure(format!("D{}^2 mismatch", i + 1)));
            }
            if n >= 3 {
                let d = &self.boundary[(i + 1) % n];
                if intersect(c, d)? != 1 {
                    return Err(Error::Structure(format!(
                        "D{} and D{} do not meet once",
                        i + 1,
                        (i + 1) % n + 1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn parse(&self, text: &str) -> Result<CurveClass> {
        parse_class(text, &self.labels)
    }

    pub fn format(&self, c: &[i64]) -> String {
        format_class(c, &self.labels)
    }
}

/// Labels H, E1, ..., Ek.
pub fn standard_labels(k: usize) -> Vec<String> {
    std::iter::once("H".to_string()).chain((1..=k).map(|i| format!("E{i}"))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_examples() {
        let l = standard_labels(4);
        let h = parse_class("H", &l).unwrap();
        assert_eq!(intersect(&h, &h).unwrap(), 1);
        let c = parse_class("H-E1-E2", &l).unwrap();
        assert_eq!(intersect(&c, &c).unwrap(), -1);
        let e1 = parse_class("E1", &l).unwrap();
        assert_eq!(intersect(&e1, &e1).unwrap(), -1);
        assert!(intersect(&h, &[1, 0]).is_err());
    }

    #[test]
    fn anticanonical_degrees() {
        for k in 0..8 {
            let k_cls = anticanonical(k);
            assert_eq!(intersect(&k_cls, &k_cls).unwrap(), 9 - k as i64);
            assert_eq!(anticanonical_degree(&k_cls), 9 - k as i64);
        }
        let l = standard_labels(4);
        assert_eq!(anticanonical_degree(&parse_class("E1", &l).unwrap()), 1);
        assert_eq!(anticanonical_degree(&parse_class("H", &l).unwrap()), 3);
    }

    #[test]
    fn parse_and_format_roundtrip() {
        let l = standard_labels(7);
        for s in ["2H-E1-E2-E3", "H+E3", "-E1", "0", "3H-2E1-E2"] {
            assert_eq!(format_class(&parse_class(s, &l).unwrap(), &l), s);
        }
        assert!(parse_class("E9", &l).is_err());
    }

    #[test]
    fn orbit_examples() {
        let l = standard_labels(7);
        let sym = Symmetry::new(vec![vec![1, 2], vec![3, 4, 5, 6, 7]], 8).unwrap();
        let o = orbit_expand(&parse_class("H+E3", &l).unwrap(), &sym);
        assert_eq!(o.len(), 5);
        let o = orbit_expand(&parse_class("2H-E1-E2-E3", &l).unwrap(), &sym);
        assert_eq!(o.len(), 5);
        let o = orbit_expand(&parse_class("3H-E1-E2-E3-E4-E5-E6-E7", &l).unwrap(), &sym);
        assert_eq!(o.len(), 1);
        assert!(Symmetry::new(vec![vec![1, 2], vec![2, 3]], 8).is_err());
        assert!(Symmetry::new(vec![vec![1, 9]], 8).is_err());
    }
}
