//! Browser demo: wasm-bindgen exports over the scattering engine. Each
//! export returns a JSON string; the `*_json` functions hold the logic so
//! they can be exercised natively.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use scatter_core::base::{det, V2};
use scatter_core::broken::{expansion_json, BrokenLine, Endpoint};
use scatter_core::fixtures;
use scatter_core::pipeline;
use scatter_core::series::term_text;

/// Orders above this take too long for an interactive page.
pub const MAX_ORDER: i64 = 6;

/// Surfaces offered by the page: flattened fixtures with small diagrams.
pub const SURFACES: &[&str] = &["ks-basic", "P2", "F1", "dP7", "dP5", "dP4", "dP3"];

fn check(surface: &str, order: i64) -> Result<(), String> {
    if !SURFACES.contains(&surface) {
        return Err(format!("unsupported surface '{surface}'"));
    }
    if !(1..=MAX_ORDER).contains(&order) {
        return Err(format!("order must be between 1 and {MAX_ORDER}"));
    }
    Ok(())
}

fn engine(surface: &str, order: i64) -> Result<(scatter_core::base::DualComplex, scatter_core::broken::ThetaEngine), String> {
    check(surface, order)?;
    if surface == fixtures::KS_BASIC {
        return Err("ks-basic has no base surface; theta functions need a fixture surface".into());
    }
    let c = fixtures::get(surface).and_then(|f| f.complex()).map_err(|e| e.to_string())?;
    let d = pipeline::consistent(&c, order).map_err(|e| e.to_string())?;
    let e = pipeline::engine(&c, d).map_err(|e| e.to_string())?;
    Ok((c, e))
}

/// Consistent diagram as {order, rays: [{dir, kind, terms}], boundary}.
pub fn consistent_json(surface: &str, order: i64) -> Result<String, String> {
    check(surface, order)?;
    let d = pipeline::consistent_fixture(surface, order).map_err(|e| e.to_string())?;
    let mut v = d.to_json();
    let boundary: Vec<V2> = if surface == fixtures::KS_BASIC {
        Vec::new()
    } else {
        let c = fixtures::get(surface).and_then(|f| f.complex()).map_err(|e| e.to_string())?;
        pipeline::rays(&c).map_err(|e| e.to_string())?
    };
    v["boundary"] = json!(boundary);
    Ok(v.to_string())
}

/// Trace a broken line backwards from `end` to a polyline, ending with a
/// far point along the incoming direction.
fn polyline(l: &BrokenLine, end: [f64; 2], far: f64) -> Vec<[f64; 2]> {
    let vel = l.velocities();
    let mut pts = vec![end];
    let mut x = end;
    for (k, b) in l.bends.iter().enumerate().rev() {
        let v = vel[k + 1];
        let w = [b.wall[0] as f64, b.wall[1] as f64];
        let vf = [v[0] as f64, v[1] as f64];
        let dw = w[0] * vf[1] - w[1] * vf[0];
        if dw == 0.0 {
            break;
        }
        let s = (w[0] * x[1] - w[1] * x[0]) / dw;
        x = [x[0] - s * vf[0], x[1] - s * vf[1]];
        pts.push(x);
    }
    let v0 = vel[0];
    pts.push([x[0] - far * v0[0] as f64, x[1] - far * v0[1] as f64]);
    pts
}

/// Broken lines for ϑ_v (v the `ray`-th boundary ray, 1-based) ending near
/// the lattice point (px, py), with polylines for drawing and the local
/// expansion of ϑ_v there.
pub fn broken_lines_json(surface: &str, order: i64, ray: usize, px: i64, py: i64) -> Result<String, String> {
    let (c, e) = engine(surface, order)?;
    let rays = pipeline::rays(&c).map_err(|e| e.to_string())?;
    let v = *rays.get(ray.wrapping_sub(1)).ok_or_else(|| format!("ray index must be in 1..={}", rays.len()))?;
    let z = Endpoint::near([px, py]);
    let eps = 0.02;
    let end = if [px, py] == [0, 0] {
        [eps * z.u1[0] as f64, eps * z.u1[1] as f64]
    } else {
        [px as f64 + eps * z.u1[0] as f64, py as f64 + eps * z.u1[1] as f64]
    };
    let lines = e.enumerate(v, &z).map_err(|e| e.to_string())?;
    let labels = &c.surface.labels;
    let out: Vec<Value> = lines
        .iter()
        .map(|l| {
            let mut j = l.to_json(labels);
            j["points"] = json!(polyline(l, end, 50.0));
            j
        })
        .collect();
    let theta = e.theta_at(v, &z).map_err(|e| e.to_string())?;
    let expansion: Vec<String> = theta.iter().map(|(m, a)| term_text(m, a)).collect();
    Ok(json!({"ray": v, "end": end, "lines": out, "expansion": expansion}).to_string())
}

/// Structure constants of ϑ_i·ϑ_j (1-based boundary indices).
pub fn theta_product_json(surface: &str, order: i64, i: usize, j: usize) -> Result<String, String> {
    let (c, e) = engine(surface, order)?;
    let rays = pipeline::rays(&c).map_err(|e| e.to_string())?;
    let get = |k: usize| rays.get(k.wrapping_sub(1)).copied().ok_or_else(|| format!("index must be in 1..={}", rays.len()));
    let (p, q) = (get(i)?, get(j)?);
    let prod = e.product(p, q).map_err(|e| e.to_string())?;
    let cone = |r: V2| {
        let n = rays.len();
        (0..n).find(|&k| {
            let (a, b) = (rays[k], rays[(k + 1) % n]);
            det(a, r) >= 0 && det(r, b) > 0
        })
    };
    let labelled: Vec<Value> = prod.keys().map(|r| json!({"theta": r, "cone": cone(*r).map(|k| k + 1)})).collect();
    Ok(json!({"p": p, "q": q, "product": expansion_json(&prod, &c.surface.labels), "cones": labelled}).to_string())
}

fn js<T>(r: Result<T, String>) -> Result<T, JsValue> {
    r.map_err(|m| JsValue::from_str(&m))
}

#[wasm_bindgen]
pub fn surfaces() -> String {
    json!(SURFACES.iter().map(|s| json!({"name": s, "description": fixtures::describe(s)})).collect::<Vec<_>>()).to_string()
}

#[wasm_bindgen]
pub fn consistent(surface: &str, order: i32) -> Result<String, JsValue> {
    js(consistent_json(surface, order as i64))
}

#[wasm_bindgen]
pub fn broken_lines(surface: &str, order: i32, ray: u32, px: i32, py: i32) -> Result<String, JsValue> {
    js(broken_lines_json(surface, order as i64, ray as usize, px as i64, py as i64))
}

#[wasm_bindgen]
pub fn theta_product(surface: &str, order: i32, i: u32, j: u32) -> Result<String, JsValue> {
    js(theta_product_json(surface, order as i64, i as usize, j as usize))
}
