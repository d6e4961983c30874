//! Wall-crossing automorphisms, path-ordered loops and the order-by-order
//! completion of a scattering diagram by outgoing rays.

use rayon::prelude::*;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::base::{cmp_angle_from, det, dot, gcd, primitive, DualComplex, PlFunction, V2};
use crate::error::{Error, Result};
use crate::lattice::{self, CurveClass};
use crate::series::{q, Exponent, Grading, PowerCache, Series, Q};

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

fn fresh_id() -> u64 {
    NEXT_ID.fetch_add(1, Ordering::Relaxed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RayKind {
    Incoming,
    Outgoing,
    Mixed,
}

impl RayKind {
    pub fn name(&self) -> &'static str {
        match self {
            RayKind::Incoming => "incoming",
            RayKind::Outgoing => "outgoing",
            RayKind::Mixed => "mixed",
        }
    }
}

/// A ray R_{≥0}·dir carrying a wall function with constant term 1.
#[derive(Clone, Debug)]
pub struct Ray {
    pub dir: V2,
    pub func: Series,
    id: u64,
}

impl PartialEq for Ray {
    fn eq(&self, o: &Self) -> bool {
        self.dir == o.dir && self.func == o.func
    }
}

impl Ray {
    pub fn new(dir: V2, func: Series) -> Result<Self> {
        let r = Ray { dir: primitive(dir), func, id: fresh_id() };
        r.check()?;
        Ok(r)
    }

    /// Every term is tangent to the ray and the constant term is 1.
    pub fn check(&self) -> Result<()> {
        if !self.func.constant().eq(&q(1)) {
            return Err(Error::Consistency(format!("ray {:?} has constant term != 1", self.dir)));
        }
        for e in self.func.terms().keys() {
            if det(e.dir, self.dir) != 0 {
                return Err(Error::Consistency(format!("term {:?} not tangent to ray {:?}", e.dir, self.dir)));
            }
        }
        Ok(())
    }

    /// Incoming when every term points along +dir, outgoing along -dir.
    pub fn kind(&self) -> RayKind {
        let (mut pos, mut neg) = (false, false);
        for e in self.func.terms().keys() {
            let s = dot(e.dir, self.dir);
            if s > 0 {
                pos = true;
            } else if s < 0 {
                neg = true;
            }
        }
        match (pos, neg) {
            (true, false) => RayKind::Incoming,
            (false, true) => RayKind::Outgoing,
            _ => RayKind::Mixed,
        }
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    /// Primitive normal pairing negatively with the path tangent.
    pub fn normal(&self, tangent: V2) -> Result<V2> {
        let n = [self.dir[1], -self.dir[0]];
        let s = dot(n, tangent);
        if s == 0 {
            return Err(Error::Domain(format!("path tangent {:?} is parallel to ray {:?}", tangent, self.dir)));
        }
        Ok(if s < 0 { n } else { [-n[0], -n[1]] })
    }
}

/// Finite collection of rays, at most one per primitive direction.
#[derive(Clone, Debug)]
pub struct ScatteringDiagram {
    pub rays: BTreeMap<V2, Ray>,
    pub order: i64,
    pub grading: Arc<Grading>,
    pub labels: Vec<String>,
    pub cache: Arc<PowerCache>,
}

impl PartialEq for ScatteringDiagram {
    fn eq(&self, o: &Self) -> bool {
        self.rays == o.rays && self.order == o.order && self.grading == o.grading
    }
}

/// Images of x = z^(1,0) and y = z^(0,1) under a loop, as z^q·F_q.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopImage {
    pub x: Series,
    pub y: Series,
}

impl LoopImage {
    /// F_q = z^{-q}·θ(z^q) for q = (1,0), (0,1).
    pub fn factors(&self) -> (Series, Series) {
        let r = self.x.grading().rank();
        let fx = self.x.shift(&Exponent::new([-1, 0], vec![0; r]), &q(1));
        let fy = self.y.shift(&Exponent::new([0, -1], vec![0; r]), &q(1));
        (fx, fy)
    }

    pub fn is_identity(&self) -> bool {
        let (fx, fy) = self.factors();
        fx.is_one() && fy.is_one()
    }
}

impl ScatteringDiagram {
    pub fn empty(grading: Arc<Grading>, order: i64, labels: Vec<String>) -> Self {
        ScatteringDiagram { rays: BTreeMap::new(), order, grading, labels, cache: Arc::new(PowerCache::new(true)) }
    }

    pub fn set_cache(&mut self, cache: Arc<PowerCache>) {
        self.cache = cache;
    }

    pub fn rank(&self) -> usize {
        self.grading.rank()
    }

    pub fn one(&self) -> Series {
        Series::one(&self.grading, self.order)
    }

    /// Multiply `f` into the ray along `dir`, creating the ray if needed.
    pub fn add_factor(&mut self, dir: V2, f: &Series) -> Result<()> {
        let d = primitive(dir);
        let f = f.truncate(self.order);
        let new_func = match self.rays.get(&d) {
            Some(r) => r.func.mul(&f)?,
            None => f,
        };
        if new_func.is_one() {
            self.rays.remove(&d);
        } else {
            let ray = Ray::new(d, new_func)?;
            self.rays.insert(d, ray);
        }
        Ok(())
    }

    /// Add the binomial factor 1 + c·z^e on the ray along `dir`.
    pub fn add_binomial(&mut self, dir: V2, e: Exponent, c: Q) -> Result<()> {
        let mut f = self.one();
        f.add_term(e, c);
        self.add_factor(dir, &f)
    }

    /// The diagram with every wall function truncated to `order`.
    pub fn truncated(&self, order: i64) -> ScatteringDiagram {
        let mut d = ScatteringDiagram::empty(self.grading.clone(), order, self.labels.clone());
        d.cache = self.cache.clone();
        for (k, r) in &self.rays {
            let f = r.func.truncate(order);
            if !f.is_one() {
                // keep the identity of the ray so cached powers can be shared
                // between truncations of the same function
                d.rays.insert(*k, Ray { dir: r.dir, func: f, id: r.id });
            }
        }
        d
    }

    fn cache_key(&self, ray: &Ray) -> u64 {
        ray.id.wrapping_mul(4096).wrapping_add(self.order as u64)
    }

    /// f^n for the ray's function, via the shared power cache.
    pub fn ray_power(&self, ray: &Ray, n: i64) -> Result<Arc<Series>> {
        self.cache.pow(self.cache_key(ray), &ray.func, n)
    }

    /// θ_𝔡(c·z^e) = c·z^e·f^{⟨n, r(e)⟩}.
    pub fn cross_wall(&self, ray: &Ray, e: &Exponent, c: &Q, tangent: V2) -> Result<Series> {
        let n = ray.normal(tangent)?;
        let k = dot(n, e.dir);
        let p = self.ray_power(ray, k)?;
        Ok(p.shift(e, c))
    }

    /// Apply θ_𝔡 to a whole series (as an algebra automorphism).
    pub fn cross_wall_series(&self, ray: &Ray, s: &Series, tangent: V2) -> Result<Series> {
        let n = ray.normal(tangent)?;
        let mut groups: BTreeMap<i64, Series> = BTreeMap::new();
        for (e, c) in s.terms() {
            let k = dot(n, e.dir);
            groups.entry(k).or_insert_with(|| Series::zero(s.grading(), s.order())).add_term(e.clone(), c.clone());
        }
        let parts: Vec<Result<Series>> = groups
            .into_par_iter()
            .map(|(k, part)| {
                if k == 0 {
                    return Ok(part);
                }
                let p = self.ray_power(ray, k)?;
                part.mul(&p)
            })
            .collect();
        let mut out = Series::zero(s.grading(), s.order());
        for p in parts {
            out = out.add(&p?)?;
        }
        Ok(out)
    }

    /// Rays sorted anticlockwise by angle from `start`.
    pub fn rays_from(&self, start: V2) -> Result<Vec<&Ray>> {
        for r in self.rays.values() {
            if det(r.dir, start) == 0 && dot(r.dir, start) > 0 {
                return Err(Error::Location(format!("start {:?} lies on a ray", start)));
            }
        }
        let mut v: Vec<&Ray> = self.rays.values().collect();
        v.sort_by(|a, b| cmp_angle_from(start, a.dir, b.dir));
        Ok(v)
    }

    /// A loop base point off every ray, preferring (-1,-2).
    pub fn pick_start(&self) -> V2 {
        let on_ray = |s: V2| self.rays.keys().any(|k| det(*k, s) == 0 && dot(*k, s) > 0);
        let mut s = [-1, -2];
        let mut k = 3;
        while on_ray(s) {
            s = [-(k - 1), -k];
            k += 1;
        }
        s
    }

    /// Anticlockwise path-ordered composite θ applied to x and y.
    pub fn loop_automorphism(&self, start: V2) -> Result<LoopImage> {
        let rays = self.rays_from(start)?;
        let r = self.rank();
        let mut x = Series::monomial(&self.grading, self.order, Exponent::new([1, 0], vec![0; r]), q(1));
        let mut y = Series::monomial(&self.grading, self.order, Exponent::new([0, 1], vec![0; r]), q(1));
        for ray in rays {
            let tangent = [-ray.dir[1], ray.dir[0]];
            x = self.cross_wall_series(ray, &x, tangent)?;
            y = self.cross_wall_series(ray, &y, tangent)?;
        }
        Ok(LoopImage { x, y })
    }

    /// Add outgoing rays order by order until the loop is the identity
    /// modulo `max_order`.
    pub fn make_consistent(&self, max_order: i64) -> Result<ScatteringDiagram> {
        let mut d = self.truncated(max_order);
        d.order = max_order;
        for n in 1..max_order {
            let t = d.truncated(n + 1);
            let img = t.loop_automorphism(t.pick_start())?;
            let (fx, fy) = img.factors();
            let mut defect: BTreeMap<Exponent, (Q, Q)> = BTreeMap::new();
            for (which, f) in [(0usize, &fx), (1usize, &fy)] {
                for (e, c) in f.terms() {
                    if e.is_zero() {
                        continue;
                    }
                    let g = d.grading.grade(e);
                    if g < n {
                        return Err(Error::Consistency(format!(
                            "loop not trivial below order {n}: term {} of grade {g}",
                            crate::series::term_text(e, c)
                        )));
                    }
                    let slot = defect.entry(e.clone()).or_insert_with(|| (q(0), q(0)));
                    if which == 0 {
                        slot.0 = c.clone();
                    } else {
                        slot.1 = c.clone();
                    }
                }
            }
            for (e, (dx, dy)) in defect {
                let w = e.dir;
                if w == [0, 0] {
                    return Err(Error::Consistency(format!("defect term with zero direction: {}", e.text())));
                }
                if dx.clone() * q(w[0]) + dy.clone() * q(w[1]) != q(0) {
                    return Err(Error::Consistency(format!(
                        "defect at {} is not tangent to an outgoing ray",
                        e.text()
                    )));
                }
                let g = gcd(w[0], w[1]);
                let u = [-w[0] / g, -w[1] / g];
                let nu = [u[1], -u[0]];
                let a = if nu[0] != 0 { -dx.clone() / q(nu[0]) } else { -dy.clone() / q(nu[1]) };
                if a.clone() * q(nu[0]) != -dx || a.clone() * q(nu[1]) != -dy {
                    return Err(Error::Consistency(format!("defect at {} does not factor", e.text())));
                }
                d.add_binomial(u, e, a)?;
            }
        }
        let check = d.loop_automorphism(d.pick_start())?;
        if !check.is_identity() {
            return Err(Error::Consistency("completed diagram is not consistent".into()));
        }
        Ok(d)
    }

    /// Canonical JSON: {order, grading, rays: [{dir, kind, terms}]}.
    pub fn to_json(&self) -> Value {
        let rays: Vec<Value> = self
            .rays
            .values()
            .map(|r| {
                let terms: Vec<String> = r.func.term_texts();
                json!({"dir": r.dir, "kind": r.kind().name(), "terms": terms})
            })
            .collect();
        json!({
            "order": self.order,
            "grading": {"name": self.grading.name, "weights": self.grading.weights},
            "labels": self.labels,
            "rays": rays,
        })
    }

    /// Inverse of [`ScatteringDiagram::to_json`].
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Usage(format!("bad diagram JSON: {m}"));
        let order = v["order"].as_i64().ok_or_else(|| bad("order"))?;
        let gname = v["grading"]["name"].as_str().ok_or_else(|| bad("grading"))?;
        let weights: Vec<i64> = serde_json::from_value(v["grading"]["weights"].clone()).map_err(|_| bad("weights"))?;
        let labels: Vec<String> = serde_json::from_value(v["labels"].clone()).map_err(|_| bad("labels"))?;
        let mut d = ScatteringDiagram::empty(Grading::new(gname, weights), order, labels);
        for r in v["rays"].as_array().ok_or_else(|| bad("rays"))? {
            let dir: V2 = serde_json::from_value(r["dir"].clone()).map_err(|_| bad("dir"))?;
            let mut f = Series::zero(&d.grading, order);
            for t in r["terms"].as_array().ok_or_else(|| bad("terms"))? {
                let (e, c) = parse_term(t.as_str().ok_or_else(|| bad("term"))?)?;
                f.add_term(e, c);
            }
            d.rays.insert(primitive(dir), Ray::new(dir, f)?);
        }
        Ok(d)
    }
}

/// Parse `c * z^(a,b) * t^[v0,...]`.
pub fn parse_term(s: &str) -> Result<(Exponent, Q)> {
    let bad = || Error::Usage(format!("bad term '{s}'"));
    let parts: Vec<&str> = s.split(" * ").collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let c: Q = parts[0].parse().map_err(|_| bad())?;
    let dir = parts[1].strip_prefix("z^(").and_then(|x| x.strip_suffix(')')).ok_or_else(bad)?;
    let dir: Vec<i64> = dir.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?;
    let cls = parts[2].strip_prefix("t^[").and_then(|x| x.strip_suffix(']')).ok_or_else(bad)?;
    let cls: Vec<i64> = if cls.is_empty() {
        vec![]
    } else {
        cls.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?
    };
    if dir.len() != 2 {
        return Err(bad());
    }
    Ok((Exponent::new([dir[0], dir[1]], cls), c))
}

/// The formal example: incoming (1+x) on (1,0) and (1+y) on (0,1), with
/// class lattice spanned by t1, t2 graded by total degree.
pub fn ks_basic(order: i64) -> ScatteringDiagram {
    let g = Grading::new("wall-order", vec![1, 1]);
    let mut d = ScatteringDiagram::empty(g, order, vec!["t1".into(), "t2".into()]);
    d.add_binomial([1, 0], Exponent::new([1, 0], vec![1, 0]), q(1)).unwrap();
    d.add_binomial([0, 1], Exponent::new([0, 1], vec![0, 1]), q(1)).unwrap();
    d
}

/// Wall-order grading: c ↦ Σ_j ⟨c, C_j⟩ over the blown-down curves.
pub fn wall_order_grading(c: &DualComplex) -> Arc<Grading> {
    let rank = c.surface.rank();
    let mut w = vec![0i64; rank];
    for (_, cls) in c.model.curves() {
        w[0] += cls[0];
        for k in 1..rank {
            w[k] -= cls[k];
        }
    }
    Grading::new("wall-order", w)
}

/// Anticanonical grading c ↦ ⟨-K, c⟩.
pub fn anticanonical_grading(rank: usize) -> Arc<Grading> {
    let mut w = vec![1i64; rank];
    w[0] = 3;
    Grading::new("anticanonical", w)
}

/// Class part of a wall monomial: φ(v_i) - C.
pub fn wall_class(phi: &PlFunction, v: V2, c: &CurveClass) -> CurveClass {
    lattice::sub(&phi.eval(v), c)
}

/// One incoming factor 1 + z^{(v_i, φ(v_i) - C_ij)} per blown-down curve.
pub fn initial_diagram(c: &DualComplex, order: i64) -> Result<ScatteringDiagram> {
    let rays = c.rays()?.to_vec();
    let phi = PlFunction::for_complex(c)?;
    let g = wall_order_grading(c);
    let mut d = ScatteringDiagram::empty(g, order, c.surface.labels.clone());
    for (i, cls) in c.model.curves() {
        let v = rays[i];
        d.add_binomial(v, Exponent::new(v, wall_class(&phi, v, cls)), q(1))?;
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_wall_loop_example() {
        let d = ks_basic(4);
        let img = d.loop_automorphism([-1, -2]).unwrap();
        let (fx, fy) = img.factors();
        // x -> x(1+y)
        assert_eq!(fx.len(), 2);
        // y -> y(1+x+xy)^{-1}
        let g = &d.grading;
        let mut base = Series::one(g, 4);
        base.add_term(Exponent::new([1, 0], vec![1, 0]), q(1));
        base.add_term(Exponent::new([1, 1], vec![1, 1]), q(1));
        assert_eq!(fy, base.inverse().unwrap());
    }

    #[test]
    fn ks_basic_completion() {
        let d = ks_basic(4).make_consistent(4).unwrap();
        assert_eq!(d.rays.len(), 5);
        let r = &d.rays[&[-1, -1]];
        assert_eq!(r.func.term_texts(), vec!["1 * z^(0,0) * t^[0,0]", "1 * z^(1,1) * t^[1,1]"]);
        assert_eq!(r.kind(), RayKind::Outgoing);
        assert_eq!(d.rays[&[-1, 0]].func.len(), 2);
        assert_eq!(d.rays[&[0, -1]].func.len(), 2);
    }

    #[test]
    fn cross_wall_examples() {
        let d = ks_basic(4);
        let ray = &d.rays[&[1, 0]];
        let r = d.rank();
        let t = [0, 1];
        let img = d.cross_wall(ray, &Exponent::new([1, 0], vec![0; r]), &q(1), t).unwrap();
        assert_eq!(img.len(), 1);
        let img = d.cross_wall(ray, &Exponent::new([0, 1], vec![0; r]), &q(1), t).unwrap();
        assert_eq!(img.len(), 4);
        assert!(d.cross_wall(ray, &Exponent::new([0, 1], vec![0; r]), &q(1), [1, 0]).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let d = ks_basic(3).make_consistent(3).unwrap();
        let v = d.to_json();
        let e = ScatteringDiagram::from_json(&v).unwrap();
        assert_eq!(e.to_json(), v);
    }
}
