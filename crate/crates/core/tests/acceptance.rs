//! Acceptance run: one PASS / PASS-WITH-ERRATUM / FAIL line per criterion.
//! PASS-WITH-ERRATUM means the computation matches the reference once the
//! recorded corrections to the printed data are applied; the differences
//! from the printed data are listed under the line.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use scatter_core::base::{primitive, V2};
use scatter_core::broken::Endpoint;
use scatter_core::fixtures;
use scatter_core::jacobian::{groebner_basis, Ideal};
use scatter_core::pipeline;
use scatter_core::poly::{vars, Poly};
use scatter_core::scatter::ScatteringDiagram;
use scatter_core::series::{q, Exponent, Grading, Series};
use scatter_core::verify::{self, Options, Report, Status};

struct Criterion {
    number: u8,
    check: &'static str,
    budget: Duration,
}

const CRITERIA: &[Criterion] = &[
    Criterion { number: 1, check: "ks-basic", budget: Duration::from_secs(1) },
    Criterion { number: 2, check: "dp5", budget: Duration::from_secs(10) },
    Criterion { number: 3, check: "dp4", budget: Duration::from_secs(60) },
    Criterion { number: 4, check: "dp3", budget: Duration::from_secs(30 * 60) },
    Criterion { number: 5, check: "b-values", budget: Duration::from_secs(1) },
    Criterion { number: 6, check: "family", budget: Duration::from_secs(5) },
    Criterion { number: 7, check: "jacobian", budget: Duration::from_secs(5) },
];

fn print(number: u8, r: &Report, budget: Duration) -> bool {
    let mut status = r.status;
    let over = r.millis > budget.as_millis();
    if over {
        status = Status::Fail;
    }
    println!("criterion {number}: {:<17} {} ({} ms, budget {} ms)", status.label(), r.summary, r.millis, budget.as_millis());
    if over {
        println!("    runtime exceeds the budget");
    }
    for d in &r.details {
        println!("    {d}");
    }
    status.ok()
}

/// Deterministic sweep of the randomized property suites (which live in
/// tests/properties.rs) over small exhaustive grids.
fn property_sweep() -> Result<String, String> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    let fail = |m: String| Err::<String, String>(m);

    // Truncated-ring axioms.
    let g = Grading::new("sweep", vec![1, 1]);
    let mk = |ts: &[([i64; 2], [i64; 2], i64)]| {
        let mut s = Series::one(&g, 5);
        for (d, c, k) in ts {
            s.add_term(Exponent::new(*d, c.to_vec()), q(*k));
        }
        s
    };
    let samples = [
        mk(&[([1, 0], [1, 0], 1)]),
        mk(&[([0, 1], [0, 1], -2), ([1, 1], [1, 1], 3)]),
        mk(&[([1, -1], [2, 0], 1), ([-1, 0], [0, 1], 5)]),
        mk(&[([2, 1], [1, 2], -1), ([0, 0], [1, 0], 1), ([1, 0], [0, 3], 2)]),
    ];
    for a in &samples {
        for b in &samples {
            for c in &samples {
                let ab = a.mul(b).unwrap();
                if ab != b.mul(a).unwrap() || ab.mul(c).unwrap() != a.mul(&b.mul(c).unwrap()).unwrap() {
                    return fail("series ring axiom".into());
                }
                let lhs = a.mul(&b.add(c).unwrap()).unwrap();
                if lhs != ab.add(&a.mul(c).unwrap()).unwrap() {
                    return fail("distributivity".into());
                }
                *counts.entry("ring").or_default() += 1;
            }
        }
        if a.mul(&a.inverse().unwrap()).unwrap() != Series::one(&g, 5) {
            return fail("inverse".into());
        }
    }

    // Wall crossing and completion on small two-wall diagrams.
    let dirs: Vec<V2> = [[1, 0], [0, 1], [1, 1], [-1, 2], [2, -1], [1, -1]].to_vec();
    for (i, &u) in dirs.iter().enumerate() {
        for &v in &dirs[i + 1..] {
            let gg = Grading::new("sweep", vec![1, 1]);
            let mut d = ScatteringDiagram::empty(gg, 4, vec!["t1".into(), "t2".into()]);
            d.add_binomial(u, Exponent::new(u, vec![1, 0]), q(1)).unwrap();
            d.add_binomial(v, Exponent::new(v, vec![0, 1]), q(1)).unwrap();
            let ray = &d.rays[&primitive(u)];
            let t = [-u[1], u[0]];
            for p in [[1, 0], [0, 1], [1, 2], [-2, 1]] {
                let e = Exponent::new(p, vec![0, 0]);
                let a = d.cross_wall(ray, &e, &q(1), t).unwrap();
                let sq = d.cross_wall(ray, &e.add(&e), &q(1), t).unwrap();
                if a.mul(&a).unwrap() != sq {
                    return fail(format!("cross-wall multiplicativity on {u:?}"));
                }
                if d.cross_wall_series(ray, &a, [-t[0], -t[1]]).unwrap() != Series::monomial(&d.grading, 4, e, q(1)) {
                    return fail(format!("cross-wall invertibility on {u:?}"));
                }
                *counts.entry("cross-wall").or_default() += 1;
            }
            let c4 = d.make_consistent(4).unwrap();
            let again = c4.make_consistent(4).unwrap();
            let c3 = d.truncated(3).make_consistent(3).unwrap();
            if again.to_json() != c4.to_json() || c4.truncated(3).to_json()["rays"] != c3.to_json()["rays"] {
                return fail(format!("completion idempotence / order stability for {u:?}, {v:?}"));
            }
            *counts.entry("completion").or_default() += 1;
        }
    }

    // Theta products on dP5.
    let c = fixtures::get("dP5").unwrap().complex().unwrap();
    let e = pipeline::engine(&c, pipeline::consistent(&c, 8).unwrap()).unwrap();
    let pts: Vec<V2> = (-1..=1).flat_map(|a| (-1..=1).map(move |b| [a, b])).filter(|p| *p != [0, 0]).collect();
    for &p in &pts {
        for &r in &pts {
            let a = e.product(p, r).unwrap();
            if a != e.product(r, p).unwrap() {
                return fail(format!("theta product symmetry {p:?} {r:?}"));
            }
            if a.values().flat_map(|m| m.values()).any(|x| *x <= q(0)) {
                return fail(format!("positivity {p:?} {r:?}"));
            }
            let b = e.product_with(p, r, |x| Endpoint::with_perturbation(x, [-3, 1], [1, -4])).unwrap();
            if a != b {
                return fail(format!("endpoint independence {p:?} {r:?}"));
            }
            *counts.entry("theta").or_default() += 1;
        }
    }
    let one = BTreeMap::from([([0, 0], BTreeMap::from([(vec![0; c.surface.rank()], q(1))]))]);
    for &p in &pts[..4] {
        for &r in &pts {
            for &s in &pts[4..] {
                let l = e.multiply(&e.multiply(&e.multiply(&one, p).unwrap(), r).unwrap(), s).unwrap();
                let rr = e.multiply(&e.multiply(&e.multiply(&one, r).unwrap(), s).unwrap(), p).unwrap();
                if l != rr {
                    return fail(format!("associativity {p:?} {r:?} {s:?}"));
                }
                *counts.entry("associativity").or_default() += 1;
            }
        }
    }

    // Gröbner reduction to zero and idempotence.
    let v = vars(&["x", "y"]);
    for a in 1..=3 {
        for b in 1..=3 {
            let gens = vec![
                Poly::parse(&v, &format!("x^{a} - y + 1")).unwrap(),
                Poly::parse(&v, &format!("y^{b} + x*y - 2")).unwrap(),
            ];
            let basis = groebner_basis(&v, &gens).unwrap();
            if groebner_basis(&v, &basis).unwrap() != basis {
                return fail("basis idempotence".into());
            }
            let mut i = Ideal::new(&v, gens.clone()).unwrap();
            if gens.iter().any(|p| !i.normal_form(p).unwrap().is_zero()) {
                return fail("reduction to zero".into());
            }
            *counts.entry("groebner").or_default() += 1;
        }
    }
    Ok(counts.iter().map(|(k, n)| format!("{k} {n}")).collect::<Vec<_>>().join(", "))
}

fn main() -> ExitCode {
    let opts = Options::default();
    let mut ok = true;
    for c in CRITERIA {
        match verify::run(c.check, &opts) {
            Ok(r) => ok &= print(c.number, &r, c.budget),
            Err(e) => {
                println!("criterion {}: FAIL              {}: error {e}", c.number, c.check);
                ok = false;
            }
        }
    }
    let t = Instant::now();
    let sweep = property_sweep();
    let ms = t.elapsed().as_millis();
    let budget = 5 * 60 * 1000;
    match sweep {
        Ok(s) if ms <= budget => println!(
            "criterion 8: {:<17} property sweep: {s} ({ms} ms, budget {budget} ms); randomized suites in tests/properties.rs",
            "PASS"
        ),
        Ok(s) => {
            println!("criterion 8: {:<17} property sweep: {s} ({ms} ms) exceeds budget {budget} ms", "FAIL");
            ok = false;
        }
        Err(m) => {
            println!("criterion 8: {:<17} property sweep failed: {m}", "FAIL");
            ok = false;
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
