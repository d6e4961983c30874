//! The dual intersection complex of a Looijenga pair, its charts, the PL
//! functions φ and E, and the toric-model flattening to R².

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::lattice::{self, intersect, CurveClass, SurfaceData};
use crate::series::{q, Q};

pub type V2 = [i64; 2];

pub fn det(a: V2, b: V2) -> i64 {
    a[0] * b[1] - a[1] * b[0]
}

pub fn dot(a: V2, b: V2) -> i64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn gcd(a: i64, b: i64) -> i64 {
    num_integer::gcd(a, b)
}

pub fn primitive(v: V2) -> V2 {
    let g = gcd(v[0], v[1]);
    if g == 0 {
        v
    } else {
        [v[0] / g, v[1] / g]
    }
}

pub fn is_parallel(a: V2, b: V2) -> bool {
    det(a, b) == 0
}

/// Same direction (positive multiple).
pub fn same_ray(a: V2, b: V2) -> bool {
    det(a, b) == 0 && dot(a, b) > 0
}

fn half(v: [i128; 2]) -> u8 {
    if v[1] > 0 || (v[1] == 0 && v[0] > 0) {
        0
    } else {
        1
    }
}

/// Compare the anticlockwise angles of `a` and `b` measured from `start`,
/// in [0, 2π). Exact integer arithmetic.
pub fn cmp_angle_from(start: V2, a: V2, b: V2) -> Ordering {
    let rot = |v: V2| -> [i128; 2] {
        let (s0, s1, v0, v1) = (start[0] as i128, start[1] as i128, v[0] as i128, v[1] as i128);
        [s0 * v0 + s1 * v1, s0 * v1 - s1 * v0]
    };
    let (ra, rb) = (rot(a), rot(b));
    let (ha, hb) = (half(ra), half(rb));
    if ha != hb {
        return ha.cmp(&hb);
    }
    let c = ra[0] * rb[1] - ra[1] * rb[0];
    0.cmp(&c)
}

/// True when `w` lies in the open cone spanned by `a` and `b`, assuming the
/// anticlockwise sweep from `a` to `b` is less than π.
pub fn in_open_cone(w: V2, a: V2, b: V2) -> bool {
    det(a, w) > 0 && det(w, b) > 0
}

/// Blow-down data: per boundary ray, the classes of the interior (-1)-curves
/// contracted onto that component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToricModel {
    pub name: String,
    pub blowdowns: Vec<Vec<CurveClass>>,
}

impl ToricModel {
    pub fn empty(n: usize) -> Self {
        ToricModel { name: "identity".into(), blowdowns: vec![Vec::new(); n] }
    }

    pub fn curves(&self) -> impl Iterator<Item = (usize, &CurveClass)> {
        self.blowdowns.iter().enumerate().flat_map(|(i, v)| v.iter().map(move |c| (i, c)))
    }
}

/// A chart sends (v_{i-1}, v_i, v_{i+1}) to these three vectors.
pub type Chart = [V2; 3];

/// Where a point of the base lies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    /// On the ray generated by v_i.
    Ray(usize),
    /// In the open cone spanned by v_i and v_{i+1}.
    Cell(usize),
}

/// The dual intersection complex, stored chart by chart; `flattened` holds
/// a global embedding of the rays in Z² when one exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualComplex {
    pub surface: SurfaceData,
    /// Self-intersections used for the charts (after any blow-down).
    pub self_intersections: Vec<i64>,
    pub charts: Vec<Chart>,
    pub flattened: Option<Vec<V2>>,
    pub model: ToricModel,
}

fn mat_from_cols(a: V2, b: V2) -> [[i64; 2]; 2] {
    [[a[0], b[0]], [a[1], b[1]]]
}

fn mat_mul(a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    let mut c = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// Inverse of an SL(2,Z) matrix.
fn mat_inv(a: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]]
}

fn charts_for(self_int: &[i64]) -> Vec<Chart> {
    self_int.iter().map(|&d| [[1, 0], [0, 1], [-1, -d]]).collect()
}

/// Build the fan v_1 = (1,0), v_2 = (0,1), v_{i+1} = -v_{i-1} - d_i v_i and
/// check it closes up after one full turn.
fn develop(self_int: &[i64]) -> Result<Vec<V2>> {
    let n = self_int.len();
    let mut v: Vec<V2> = vec![[1, 0], [0, 1]];
    for i in 1..=n {
        let d = self_int[i % n];
        let (a, b) = (v[i - 1], v[i]);
        v.push([-a[0] - d * b[0], -a[1] - d * b[1]]);
    }
    if v[n] != v[0] || v[n + 1] != v[1] {
        return Err(Error::Model(format!(
            "charts do not close up: developing gives {:?} and {:?} after one turn",
            v[n],
            v[n + 1]
        )));
    }
    v.truncate(n);
    // winding number: every consecutive pair has det 1, so the angles are
    // increasing; the total turn is 2π exactly when the positive x-axis is
    // crossed once.
    let mut crossings = 0;
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        if det(a, b) != 1 {
            return Err(Error::Model("consecutive rays do not form a unimodular cone".into()));
        }
        if half([a[0] as i128, a[1] as i128]) == 1 && half([b[0] as i128, b[1] as i128]) == 0 {
            crossings += 1;
        }
    }
    if crossings != 1 {
        return Err(Error::Model(format!("developed fan winds {crossings} times")));
    }
    Ok(v)
}

impl DualComplex {
    /// Dual complex of (S, D) with its charts; flattened when the charts
    /// close up in R² (the toric case).
    pub fn build(s: &SurfaceData) -> Result<Self> {
        s.validate()?;
        let n = s.boundary.len();
        if n < 3 {
            return Err(Error::Structure(
                "fewer than three boundary components: blow up the nodes first".into(),
            ));
        }
        let flattened = develop(&s.self_intersections).ok();
        Ok(DualComplex {
            surface: s.clone(),
            self_intersections: s.self_intersections.clone(),
            charts: charts_for(&s.self_intersections),
            flattened,
            model: ToricModel::empty(n),
        })
    }

    /// Flatten by blowing down the model's curves.
    pub fn flatten(&self, model: &ToricModel) -> Result<Self> {
        let s = &self.surface;
        let n = s.boundary.len();
        if model.blowdowns.len() != n {
            return Err(Error::Model("model must list blow-downs for every boundary ray".into()));
        }
        let curves: Vec<(usize, &CurveClass)> = model.curves().collect();
        for &(i, c) in &curves {
            if c.len() != s.rank() {
                return Err(Error::Model("blow-down class has wrong length".into()));
            }
            if intersect(c, c)? != -1 || lattice::anticanonical_degree(c) != 1 {
                return Err(Error::Model(format!("{} is not a (-1)-curve", s.format(c))));
            }
            for (j, d) in s.boundary.iter().enumerate() {
                let want = if i == j { 1 } else { 0 };
                if intersect(c, d)? != want {
                    return Err(Error::Model(format!(
                        "{} meets D{} with multiplicity {}",
                        s.format(c),
                        j + 1,
                        intersect(c, d)?
                    )));
                }
            }
        }
        for a in 0..curves.len() {
            for b in a + 1..curves.len() {
                if intersect(curves[a].1, curves[b].1)? != 0 {
                    return Err(Error::Model("blown-down curves are not disjoint".into()));
                }
            }
        }
        let self_int: Vec<i64> =
            (0..n).map(|i| s.self_intersections[i] + model.blowdowns[i].len() as i64).collect();
        let flat = develop(&self_int)?;
        Ok(DualComplex {
            surface: s.clone(),
            self_intersections: self_int.clone(),
            charts: charts_for(&self_int),
            flattened: Some(flat),
            model: model.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.surface.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.surface.boundary.is_empty()
    }

    pub fn rays(&self) -> Result<&[V2]> {
        self.flattened.as_deref().ok_or_else(|| Error::Location("complex is not flattened".into()))
    }

    /// Linear map from chart i coordinates to chart i+1 coordinates on their
    /// shared cell (v_i, v_{i+1}).
    pub fn transition(&self, i: usize) -> [[i64; 2]; 2] {
        let n = self.len();
        let ci = self.charts[i];
        let cj = self.charts[(i + 1) % n];
        // chart i: v_i -> ci[1], v_{i+1} -> ci[2]; chart i+1: v_i -> cj[0], v_{i+1} -> cj[1]
        let src = mat_from_cols(ci[1], ci[2]);
        let dst = mat_from_cols(cj[0], cj[1]);
        mat_mul(dst, mat_inv(src))
    }

    /// Composite of all chart transitions around the origin.
    pub fn monodromy(&self) -> [[i64; 2]; 2] {
        let mut m = [[1, 0], [0, 1]];
        for i in 0..self.len() {
            m = mat_mul(self.transition(i), m);
        }
        m
    }

    /// Locate a nonzero rational point in the flattened fan.
    pub fn locate(&self, p: [Q; 2]) -> Result<Location> {
        if p[0].is_zero() && p[1].is_zero() {
            return Err(Error::Domain("cannot locate the origin".into()));
        }
        let d = direction_of(&p);
        self.locate_dir(d)
    }

    /// Locate a nonzero integer direction.
    pub fn locate_dir(&self, d: V2) -> Result<Location> {
        if d == [0, 0] {
            return Err(Error::Domain("cannot locate the origin".into()));
        }
        let rays = self.rays()?;
        let n = rays.len();
        for i in 0..n {
            if same_ray(rays[i], d) {
                return Ok(Location::Ray(i));
            }
        }
        for i in 0..n {
            if in_open_cone(d, rays[i], rays[(i + 1) % n]) {
                return Ok(Location::Cell(i));
            }
        }
        Err(Error::Location("point not in any cone".into()))
    }

    /// Cell index containing `d` (for a ray, the cell starting at it).
    pub fn cell_of(&self, d: V2) -> Result<usize> {
        Ok(match self.locate_dir(d)? {
            Location::Ray(i) | Location::Cell(i) => i,
        })
    }

    /// Coefficients (a, b) with d = a v_i + b v_{i+1}.
    pub fn cone_coords(&self, cell: usize, d: V2) -> Result<(i64, i64)> {
        let rays = self.rays()?;
        let (a, b) = (rays[cell], rays[(cell + 1) % rays.len()]);
        Ok((det(d, b), det(a, d)))
    }
}

/// Integer direction of a rational 2-vector.
pub fn direction_of(p: &[Q; 2]) -> V2 {
    let l = num_integer::lcm(p[0].denom().clone(), p[1].denom().clone());
    let a: i64 = (p[0].numer() * (&l / p[0].denom())).try_into().unwrap();
    let b: i64 = (p[1].numer() * (&l / p[1].denom())).try_into().unwrap();
    [a, b]
}

/// The PL function φ: per cell a linear map Z² → classes, fixed to vanish
/// on the first cell, with prescribed kinks across each ray.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlFunction {
    pub kinks: Vec<CurveClass>,
    /// Per cell i: (φ(e1), φ(e2)) as classes.
    pub reps: Vec<[CurveClass; 2]>,
    rays: Vec<V2>,
}

impl PlFunction {
    /// φ on a flattened complex with kink p*D̄_i = D_i + ΣC_ij across v_i.
    pub fn for_complex(c: &DualComplex) -> Result<Self> {
        let rays = c.rays()?.to_vec();
        let s = &c.surface;
        let kinks: Vec<CurveClass> = (0..c.len())
            .map(|i| c.model.blowdowns[i].iter().fold(s.boundary[i].clone(), |a, e| lattice::add(&a, e)))
            .collect();
        Self::from_kinks(rays, kinks)
    }

    /// φ with arbitrary kinks; errors when they are incompatible.
    pub fn from_kinks(rays: Vec<V2>, kinks: Vec<CurveClass>) -> Result<Self> {
        let n = rays.len();
        let rank = kinks[0].len();
        let bend = |rep: &[CurveClass; 2], v: V2, k: &CurveClass| -> [CurveClass; 2] {
            // add n ⊗ k with n(p) = det(v, p) = -v_y p_x + v_x p_y
            [lattice::add(&rep[0], &lattice::scale(k, -v[1])), lattice::add(&rep[1], &lattice::scale(k, v[0]))]
        };
        let mut reps = vec![[vec![0; rank], vec![0; rank]]];
        for i in 1..n {
            let r = bend(&reps[i - 1], rays[i], &kinks[i]);
            reps.push(r);
        }
        let back = bend(&reps[n - 1], rays[0], &kinks[0]);
        if back != reps[0] {
            return Err(Error::Model("kinks of φ are not compatible around the origin".into()));
        }
        Ok(PlFunction { kinks, reps, rays })
    }

    pub fn eval_in_cell(&self, cell: usize, d: V2) -> CurveClass {
        let r = &self.reps[cell];
        lattice::add(&lattice::scale(&r[0], d[0]), &lattice::scale(&r[1], d[1]))
    }

    /// φ at an integer point.
    pub fn eval(&self, d: V2) -> CurveClass {
        if d == [0, 0] {
            return vec![0; self.reps[0][0].len()];
        }
        let n = self.rays.len();
        for i in 0..n {
            let (a, b) = (self.rays[i], self.rays[(i + 1) % n]);
            if same_ray(a, d) || in_open_cone(d, a, b) {
                return self.eval_in_cell(i, d);
            }
        }
        unreachable!("fan is complete")
    }
}

/// The PL function E with E(v_i) = -K·D_i, linear on cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EFunction {
    pub values: Vec<i64>,
    rays: Vec<V2>,
}

impl EFunction {
    pub fn for_complex(c: &DualComplex) -> Result<Self> {
        Ok(EFunction {
            values: c.surface.boundary.iter().map(|d| lattice::anticanonical_degree(d)).collect(),
            rays: c.rays()?.to_vec(),
        })
    }

    pub fn eval(&self, d: V2) -> Q {
        if d == [0, 0] {
            return q(0);
        }
        let n = self.rays.len();
        for i in 0..n {
            let (a, b) = (self.rays[i], self.rays[(i + 1) % n]);
            if same_ray(a, d) || in_open_cone(d, a, b) {
                let (x, y) = (det(d, b), det(a, d));
                return q(x * self.values[i] + y * self.values[(i + 1) % n]);
            }
        }
        unreachable!("fan is complete")
    }

    /// Kink of E across ray i: E(v_{i-1}) + E(v_{i+1}) + D̄_i² E(v_i).
    pub fn bend(&self, i: usize, self_int: i64) -> i64 {
        let n = self.values.len();
        self.values[(i + n - 1) % n] + self.values[(i + 1) % n] + self_int * self.values[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_order() {
        let s = [-1, -2];
        let mut v: Vec<V2> = vec![[1, 0], [0, 1], [-1, 0], [0, -1], [-1, -1], [1, 1]];
        v.sort_by(|a, b| cmp_angle_from(s, *a, *b));
        assert_eq!(v, vec![[0, -1], [1, 0], [1, 1], [0, 1], [-1, 0], [-1, -1]]);
    }

    #[test]
    fn develop_p1p1() {
        assert_eq!(develop(&[0, 0, 0, 0]).unwrap(), vec![[1, 0], [0, 1], [-1, 0], [0, -1]]);
        assert!(develop(&[-1, -1, -1, -1, -1]).is_err());
    }

    #[test]
    fn monodromy_trivial_when_flat() {
        let s = SurfaceData {
            name: "F1".into(),
            degree: 8,
            labels: vec!["H".into(), "E1".into()],
            boundary: vec![vec![1, -1], vec![0, 1], vec![1, -1], vec![1, 0]],
            self_intersections: vec![0, -1, 0, 1],
        };
        let c = DualComplex::build(&s).unwrap();
        assert!(c.flattened.is_some());
        assert_eq!(c.monodromy(), [[1, 0], [0, 1]]);
    }
}
