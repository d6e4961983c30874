//! Built-in surfaces, boundary cycles and toric models, plus JSON loading.

use serde::Deserialize;

use crate::base::{DualComplex, ToricModel};
use crate::error::{Error, Result};
use crate::lattice::{standard_labels, SurfaceData};

/// A surface together with the toric model used to flatten it (if any).
#[derive(Clone, Debug)]
pub struct Fixture {
    pub surface: SurfaceData,
    pub model: Option<ToricModel>,
    pub description: &'static str,
}

impl Fixture {
    /// Dual complex, flattened by the model when one is given.
    pub fn complex(&self) -> Result<DualComplex> {
        let c = DualComplex::build(&self.surface)?;
        match &self.model {
            Some(m) => c.flatten(m),
            None => Ok(c),
        }
    }
}

struct Raw {
    name: &'static str,
    degree: i64,
    k: usize,
    boundary: &'static [&'static str],
    model: Option<&'static [&'static [&'static str]]>,
    description: &'static str,
}

const RAW: &[Raw] = &[
    Raw {
        name: "P2",
        degree: 9,
        k: 0,
        boundary: &["H", "H", "H"],
        model: Some(&[&[], &[], &[]]),
        description: "projective plane with its toric boundary triangle",
    },
    Raw {
        name: "F1",
        degree: 8,
        k: 1,
        boundary: &["H-E1", "E1", "H-E1", "H"],
        model: Some(&[&[], &[], &[], &[]]),
        description: "Hirzebruch surface F1 (P2 blown up once) with toric boundary",
    },
    Raw {
        name: "dP7",
        degree: 7,
        k: 2,
        boundary: &["E1", "H-E1-E2", "E2", "H-E2", "H-E1"],
        model: Some(&[&[], &[], &[], &[], &[]]),
        description: "P2 blown up at two points with toric boundary pentagon",
    },
    Raw {
        name: "dP5",
        degree: 5,
        k: 4,
        boundary: &["E1", "H-E1-E2", "E2", "H-E2-E3", "H-E1-E4"],
        model: Some(&[&[], &[], &[], &["E3"], &["E4"]]),
        description: "degree 5 del Pezzo, boundary pentagon of (-1)-curves, toric model dP7",
    },
    Raw {
        name: "dP4",
        degree: 4,
        k: 5,
        boundary: &["E1", "H-E1-E2", "H-E3-E4", "H-E1-E5"],
        model: Some(&[&["H-E1-E3"], &["E2"], &["E4"], &["E5"]]),
        description: "degree 4 del Pezzo, boundary square of (-1)-curves, toric model P1xP1",
    },
    Raw {
        name: "dP3",
        degree: 3,
        k: 6,
        boundary: &["H-E1-E2", "H-E3-E4", "H-E5-E6"],
        model: Some(&[&["E1", "E2"], &["E3", "E4"], &["E5", "E6"]]),
        description: "cubic surface, boundary triangle of lines, toric model P2",
    },
    Raw {
        name: "dP2",
        degree: 2,
        k: 7,
        boundary: &["H-E1-E2", "2H-E3-E4-E5-E6-E7"],
        model: None,
        description: "degree 2 del Pezzo with boundary a line L and conic C (two components)",
    },
    Raw {
        name: "dP2-blown-up",
        degree: 2,
        k: 9,
        boundary: &["H-E1-E2-E8-E9", "E8", "2H-E3-E4-E5-E6-E7-E8-E9", "E9"],
        model: Some(&[&["E1", "E2"], &["H-E7-E8"], &["E3", "E4", "E5", "E6"], &["H-E7-E9"]]),
        description: "dP2 with the two nodes of L+C blown up (exceptional curves E8, E9), toric model F1",
    },
];

/// Formal two-wall diagram with incoming (1+x) on (1,0) and (1+y) on (0,1).
pub const KS_BASIC: &str = "ks-basic";

/// Names of all built-in fixtures, including the formal `ks-basic` diagram.
pub fn names() -> Vec<&'static str> {
    let mut v: Vec<&'static str> = RAW.iter().map(|r| r.name).collect();
    v.push(KS_BASIC);
    v
}

pub fn describe(name: &str) -> Option<&'static str> {
    if name == KS_BASIC {
        return Some("formal two-wall diagram: (1+x) on (1,0) and (1+y) on (0,1)");
    }
    RAW.iter().find(|r| r.name == name).map(|r| r.description)
}

/// Look up a built-in surface fixture.
pub fn get(name: &str) -> Result<Fixture> {
    let r = RAW
        .iter()
        .find(|r| r.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::Usage(format!("unknown fixture '{name}'")))?;
    let labels = standard_labels(r.k);
    let boundary = r
        .boundary
        .iter()
        .map(|s| crate::lattice::parse_class(s, &labels))
        .collect::<Result<Vec<_>>>()?;
    let self_intersections = boundary.iter().map(|c| crate::lattice::intersect(c, c)).collect::<Result<_>>()?;
    let surface = SurfaceData { name: r.name.into(), degree: r.degree, labels: labels.clone(), boundary, self_intersections };
    let model = match r.model {
        None => None,
        Some(m) => Some(ToricModel {
            name: format!("{}-model", r.name),
            blowdowns: m
                .iter()
                .map(|v| v.iter().map(|s| crate::lattice::parse_class(s, &labels)).collect::<Result<Vec<_>>>())
                .collect::<Result<_>>()?,
        }),
    };
    Ok(Fixture { surface, model, description: r.description })
}

#[derive(Deserialize)]
struct SurfaceFile {
    #[serde(default)]
    name: Option<String>,
    degree: i64,
    labels: Vec<String>,
    boundary: Vec<Vec<i64>>,
    #[serde(rename = "selfIntersections")]
    self_intersections: Vec<i64>,
    #[serde(default)]
    model: Option<Vec<Vec<String>>>,
}

/// Parse a surface JSON document with an optional toric model given as
/// per-ray lists of class expressions (e.g. `["E3"]` or `["H-E1-E3"]`).
pub fn from_json(text: &str) -> Result<Fixture> {
    let f: SurfaceFile = serde_json::from_str(text).map_err(|e| Error::Usage(format!("bad surface JSON: {e}")))?;
    let surface = SurfaceData {
        name: f.name.unwrap_or_else(|| "custom".into()),
        degree: f.degree,
        labels: f.labels,
        boundary: f.boundary,
        self_intersections: f.self_intersections,
    };
    surface.validate()?;
    let model = match f.model {
        None => None,
        Some(m) => Some(ToricModel {
            name: "custom-model".into(),
            blowdowns: m
                .iter()
                .map(|v| v.iter().map(|s| surface.parse(s)).collect::<Result<Vec<_>>>())
                .collect::<Result<_>>()?,
        }),
    };
    Ok(Fixture { surface, model, description: "loaded from file" })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_validate() {
        for n in names() {
            if n == KS_BASIC {
                continue;
            }
            let f = get(n).unwrap();
            f.surface.validate().unwrap();
            if f.surface.boundary.len() >= 3 {
                f.complex().unwrap();
            }
        }
    }

    #[test]
    fn expected_fans() {
        let rays = |n: &str| get(n).unwrap().complex().unwrap().flattened.unwrap();
        assert_eq!(rays("P2"), vec![[1, 0], [0, 1], [-1, -1]]);
        assert_eq!(rays("dP3"), vec![[1, 0], [0, 1], [-1, -1]]);
        assert_eq!(rays("dP4"), vec![[1, 0], [0, 1], [-1, 0], [0, -1]]);
        assert_eq!(rays("dP5"), vec![[1, 0], [0, 1], [-1, 1], [-1, 0], [1, -1]]);
    }

    #[test]
    fn dp5_without_model_is_not_flat() {
        let f = get("dP5").unwrap();
        let c = DualComplex::build(&f.surface).unwrap();
        assert!(c.flattened.is_none());
        assert_ne!(c.monodromy(), [[1, 0], [0, 1]]);
    }

    #[test]
    fn two_component_boundary_refused() {
        let f = get("dP2").unwrap();
        assert!(matches!(DualComplex::build(&f.surface), Err(Error::Structure(_))));
        let b = get("dP2-blown-up").unwrap();
        let c = DualComplex::build(&b.surface).unwrap();
        assert_eq!(c.len(), 4);
    }

    #[test]
    fn bad_model_rejected() {
        let f = get("dP5").unwrap();
        let c = DualComplex::build(&f.surface).unwrap();
        let bad = ToricModel { name: "bad".into(), blowdowns: vec![vec![], vec![], vec![], vec![], vec![f.surface.parse("E3").unwrap()]] };
        assert!(matches!(c.flatten(&bad), Err(Error::Model(_))));
    }

    #[test]
    fn json_roundtrip() {
        let txt = r#"{"degree":9,"labels":["H"],"boundary":[[1],[1],[1]],"selfIntersections":[1,1,1]}"#;
        let f = from_json(txt).unwrap();
        assert_eq!(f.surface.boundary.len(), 3);
        assert!(from_json(r#"{"degree":9}"#).is_err());
    }
}
