//! `scatter`: command-line front end for the scattering engine.
//!
//! Exit codes: 0 success, 1 a verify check failed, 2 configuration or
//! input error, 3 internal consistency failure.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use scatter_core::base::DualComplex;
use scatter_core::broken::expansion_json;
use scatter_core::dp2;
use scatter_core::error::Error;
use scatter_core::fixtures::{self, Fixture};
use scatter_core::jacobian::{self, Ideal, MONOMIAL_ORDER};
use scatter_core::pipeline;
use scatter_core::poly::{vars, Poly};
use scatter_core::relations::{latex_table, relation_json};
use scatter_core::scatter::ScatteringDiagram;
use scatter_core::series::q_text;
use scatter_core::verify::{self, Options, Status};

#[derive(Parser)]
#[command(name = "scatter", version, about = "Exact scattering diagrams, theta functions and mirror equations")]
struct Cli {
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    threads: u16,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Complete the initial diagram of a surface to a consistent one.
    Consistent {
        /// Fixture name (see `fixtures list`) or path to a surface JSON file.
        #[arg(long)]
        surface: String,
        #[arg(long)]
        order: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Theta-function relations (or one product ϑ_i ϑ_j) of a surface.
    Theta {
        #[arg(long)]
        surface: String,
        #[arg(long)]
        order: i64,
        /// `all` for the presenting relations, or `i,j` (1-based boundary
        /// indices) for the single product ϑ_i ϑ_j.
        #[arg(long, default_value = "all")]
        pairs: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the relations as a LaTeX table.
        #[arg(long)]
        latex: Option<PathBuf>,
    },
    /// Eliminate the dP2 relations to the family equation.
    Dp2Family {
        /// Fail (exit 3) unless the B-values are the expected eight integers.
        #[arg(long)]
        check_b_values: bool,
        /// Use the N_k products as printed, without the recorded erratum.
        #[arg(long)]
        printed_fixture: bool,
        /// Also recompute constant terms with the scattering engine at this
        /// order and report which fixture coefficients it reaches.
        #[arg(long)]
        engine_order: Option<i64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Critical ideal of a potential and the dimension of its quotient ring.
    Jacobian {
        /// `builtin` for the unit dP2 fibre, or a file written by `dp2-family`.
        #[arg(long, conflicts_with = "eqs")]
        family: Option<String>,
        /// Potential W, e.g. "tC+tL" or "x + y + 1/(x*y)".
        #[arg(long)]
        potential: String,
        /// Comma-separated variables (required without --family).
        #[arg(long)]
        vars: Option<String>,
        /// Semicolon-separated equations of the surface.
        #[arg(long)]
        eqs: Option<String>,
        /// Treat W as a Laurent polynomial on the torus.
        #[arg(long)]
        laurent: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run named end-to-end checks and report pass/fail.
    Verify {
        /// Comma-separated check ids (default: the fast checks).
        #[arg(long)]
        only: Option<String>,
        #[arg(long)]
        printed_fixture: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Built-in fixtures.
    Fixtures {
        #[command(subcommand)]
        action: FixturesAction,
    },
}

#[derive(Subcommand)]
enum FixturesAction {
    List,
}

enum Failure {
    Core(Error),
    Config(String),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Consistency(_) | Error::Integrity(_) | Error::Domain(_) | Error::Inversion(_) | Error::Location(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.threads as usize).build();
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Checks) => ExitCode::from(1),
    }
}

fn run(cmd: Command) -> Res<()> {
    match cmd {
        Command::Consistent { surface, order, out } => {
            let d = consistent(&surface, order)?;
            emit(&d.to_json(), out.as_deref())
        }
        Command::Theta { surface, order, pairs, out, latex } => theta(&surface, order, &pairs, out, latex),
        Command::Dp2Family { check_b_values, printed_fixture, engine_order, out } => {
            dp2_family(check_b_values, printed_fixture, engine_order, out)
        }
        Command::Jacobian { family, potential, vars, eqs, laurent, out } => {
            jacobian_cmd(family, &potential, vars, eqs, laurent, out)
        }
        Command::Verify { only, printed_fixture, out } => verify_cmd(only, printed_fixture, out),
        Command::Fixtures { action: FixturesAction::List } => {
            for n in fixtures::names() {
                println!("{n:<14} {}", fixtures::describe(n).unwrap_or(""));
            }
            Ok(())
        }
    }
}

fn emit(v: &Value, out: Option<&Path>) -> Res<()> {
    let text = serde_json::to_string_pretty(v).map_err(|e| Failure::Config(e.to_string()))? + "\n";
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Config(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_surface(spec: &str) -> Res<Fixture> {
    if fixtures::names().iter().any(|n| n.eq_ignore_ascii_case(spec)) {
        return Ok(fixtures::get(spec)?);
    }
    let p = Path::new(spec);
    if p.exists() {
        let text = fs::read_to_string(p).map_err(|e| Failure::Config(format!("cannot read {spec}: {e}")))?;
        return Ok(fixtures::from_json(&text)?);
    }
    Err(Failure::Config(format!("'{spec}' is neither a fixture name nor a file")))
}

/// Consistent diagram, reusing a copy stored under SCATTER_CACHE_DIR when
/// one exists for the same surface data, model and order.
fn consistent(surface: &str, order: i64) -> Res<ScatteringDiagram> {
    if order < 1 {
        return Err(Failure::Config(format!("order must be at least 1, got {order}")));
    }
    if surface == fixtures::KS_BASIC {
        return Ok(pipeline::consistent_fixture(surface, order)?);
    }
    let f = load_surface(surface)?;
    let c = f.complex()?;
    cached_consistent(&f, &c, order)
}

fn cached_consistent(f: &Fixture, c: &DualComplex, order: i64) -> Res<ScatteringDiagram> {
    let key = json!({"surface": f.surface, "model": format!("{:?}", f.model), "order": order});
    let path = std::env::var_os("SCATTER_CACHE_DIR").map(|d| {
        let safe: String = f.surface.name.chars().map(|ch| if ch.is_ascii_alphanumeric() || ch == '-' { ch } else { '_' }).collect();
        PathBuf::from(d).join(format!("{safe}-order{order}.json"))
    });
    if let Some(p) = &path {
        if let Some(d) = fs::read_to_string(p)
            .ok()
            .and_then(|t| serde_json::from_str::<Value>(&t).ok())
            .filter(|v| v["key"] == key)
            .and_then(|v| ScatteringDiagram::from_json(&v["diagram"]).ok())
        {
            return Ok(d);
        }
    }
    let d = pipeline::consistent(c, order)?;
    if let Some(p) = &path {
        // The cache is an optimisation only; failures to write it are ignored.
        let _ = fs::create_dir_all(p.parent().unwrap_or(Path::new(".")));
        let _ = fs::write(p, json!({"key": key, "diagram": d.to_json()}).to_string());
    }
    Ok(d)
}

fn theta(surface: &str, order: i64, pairs: &str, out: Option<PathBuf>, latex: Option<PathBuf>) -> Res<()> {
    let f = load_surface(surface)?;
    let c = f.complex()?;
    let d = cached_consistent(&f, &c, order)?;
    let e = pipeline::engine(&c, d)?;
    let labels = &c.surface.labels;
    let rays = pipeline::rays(&c)?;
    let mut doc = BTreeMap::new();
    doc.insert("surface", json!(c.surface.name));
    doc.insert("order", json!(order));
    if pairs == "all" {
        let rels = pipeline::relations(&c, &e)?;
        doc.insert("relations", Value::Array(rels.iter().map(|r| relation_json(r, labels)).collect()));
        if let Some(cmp) = pipeline::compare_to_table(&c, &rels, order)? {
            doc.insert("table", json!({"printedDiff": cmp.printed, "correctedDiff": cmp.corrected}));
        }
        if let Some(p) = latex {
            let t = latex_table(&[(c.surface.name.clone(), rels)], &BTreeMap::from([(c.surface.name.clone(), labels.clone())]));
            fs::write(&p, t).map_err(|e| Failure::Config(format!("cannot write {}: {e}", p.display())))?;
        }
    } else {
        let idx: Vec<usize> = pairs
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Failure::Config(format!("--pairs expects 'all' or 'i,j', got '{pairs}'")))?;
        if idx.len() != 2 || idx.iter().any(|&i| i == 0 || i > rays.len()) {
            return Err(Failure::Config(format!("--pairs indices must be two values in 1..={}", rays.len())));
        }
        if latex.is_some() {
            return Err(Failure::Config("--latex needs --pairs all".into()));
        }
        let prod = e.product(rays[idx[0] - 1], rays[idx[1] - 1])?;
        doc.insert("pair", json!(idx));
        doc.insert("product", expansion_json(&prod, labels));
    }
    emit(&json!(doc), out.as_deref())
}

fn dp2_family(check: bool, printed: bool, engine_order: Option<i64>, out: Option<PathBuf>) -> Res<()> {
    let vals = dp2::b_values(printed)?;
    let mut b = Vec::new();
    let mut bad = Vec::new();
    for ((t, k, v), (_, _, expected)) in vals.iter().zip(verify::b_value_targets()) {
        let oracle = dp2::b_value_oracle(*t, *k, printed)?;
        if *v != scatter_core::series::q(expected) || *v != oracle {
            bad.push(format!("B{k}({t}) = {} (oracle {}, expected {expected})", q_text(v), q_text(&oracle)));
        }
        b.push(json!({"target": t.name(), "k": k, "value": q_text(v), "oracle": q_text(&oracle)}));
    }
    if check && !bad.is_empty() {
        for m in &bad {
            eprintln!("b-value mismatch: {m}");
        }
        return Err(Failure::Core(Error::Integrity("B-values differ from the expected integers".into())));
    }
    let fam = dp2::family()?;
    let diff = dp2::family_diff(&fam, &dp2::printed_family()?);
    let gens = dp2::unit_fibre_generators(printed)?;
    let errata: Vec<Value> = if printed {
        Vec::new()
    } else {
        dp2::ERRATA.iter().map(|e| json!({"product": format!("N{}({})", e.k, e.target), "printed": e.printed, "corrected": e.corrected, "reason": e.reason})).collect()
    };
    let mut doc = json!({
        "family": {"lhs": "(t8 - t9)^2", "rhs": fam.rhs.to_string()},
        "printedDiff": diff,
        "bValues": b,
        "errata": errata,
        "unitFibre": {
            "vars": gens[0].vars().as_slice(),
            "generators": gens.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
        },
    });
    if let Some(order) = engine_order {
        let r = pipeline::dp2_engine_check(order)?;
        doc["engineCheck"] = json!({
            "order": r.order,
            "compared": r.compared,
            "fixtureOnly": r.fixture_only,
            "mismatches": r.mismatches.iter().map(|m| json!({
                "product": m.product,
                "class": scatter_core::lattice::format_class(&m.class, &dp2::labels()),
                "engine": q_text(&m.engine),
                "fixture": q_text(&m.fixture),
            })).collect::<Vec<_>>(),
        });
    }
    emit(&doc, out.as_deref())
}

fn jacobian_cmd(
    family: Option<String>,
    potential: &str,
    var_list: Option<String>,
    eqs: Option<String>,
    laurent: bool,
    out: Option<PathBuf>,
) -> Res<()> {
    let (v, gens) = match family.as_deref() {
        Some("builtin") => {
            let g = dp2::unit_fibre_generators(false)?;
            (g[0].vars().clone(), g)
        }
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("cannot read {path}: {e}")))?;
            let doc: Value = serde_json::from_str(&text).map_err(|e| Failure::Config(format!("bad JSON in {path}: {e}")))?;
            let names: Vec<String> = serde_json::from_value(doc["unitFibre"]["vars"].clone())
                .map_err(|_| Failure::Config(format!("{path}: missing unitFibre.vars")))?;
            let texts: Vec<String> = serde_json::from_value(doc["unitFibre"]["generators"].clone())
                .map_err(|_| Failure::Config(format!("{path}: missing unitFibre.generators")))?;
            let v = vars(&names.iter().map(String::as_str).collect::<Vec<_>>());
            let g = texts.iter().map(|t| Poly::parse(&v, t)).collect::<scatter_core::Result<Vec<_>>>()?;
            (v, g)
        }
        None => {
            let names = var_list.ok_or_else(|| Failure::Config("--vars is required without --family".into()))?;
            let names: Vec<&str> = names.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            let v = vars(&names);
            let g = eqs
                .as_deref()
                .unwrap_or("")
                .split(';')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|t| Poly::parse(&v, t))
                .collect::<scatter_core::Result<Vec<_>>>()?;
            (v, g)
        }
    };
    let w = Poly::parse(&v, potential)?;
    let mut ideal: Ideal =
        if laurent { jacobian::laurent_critical_ideal(&gens, &w)? } else { jacobian::critical_ideal(&v, &gens, &w)? };
    let basis: Vec<String> = ideal.groebner()?.iter().map(|p| p.to_string()).collect();
    let stair = ideal.staircase()?;
    let vnames = ideal.vars.clone();
    let mono = |m: &[i32]| Poly::monomial(&vnames, m.to_vec(), scatter_core::series::q(1)).to_string();
    let doc = json!({
        "vars": vnames.as_slice(),
        "potential": w.to_string(),
        "generators": ideal.generators.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "monomialOrder": MONOMIAL_ORDER,
        "basis": basis,
        "staircase": stair.as_ref().map(|s| s.iter().map(|m| mono(m)).collect::<Vec<_>>()),
        "dimension": match &stair { Some(s) => json!(s.len()), None => json!("infinite") },
    });
    emit(&doc, out.as_deref())
}

fn verify_cmd(only: Option<String>, printed: bool, out: Option<PathBuf>) -> Res<()> {
    let ids: Vec<String> = match only {
        Some(s) => s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect(),
        None => verify::DEFAULT_CHECKS.iter().map(|s| s.to_string()).collect(),
    };
    for id in &ids {
        if !verify::CHECKS.contains(&id.as_str()) {
            return Err(Failure::Config(format!("unknown check '{id}'; known: {}", verify::CHECKS.join(", "))));
        }
    }
    let opts = Options { printed_fixture: printed, ..Options::default() };
    let mut reports = Vec::new();
    let mut ok = true;
    for id in &ids {
        let r = match verify::run(id, &opts) {
            Ok(r) => r,
            Err(e) => {
                println!("{:<18} {:<10} error: {e}", Status::Fail.label(), id);
                ok = false;
                reports.push(json!({"id": id, "status": Status::Fail.label(), "summary": format!("error: {e}"), "details": []}));
                continue;
            }
        };
        println!("{}", r.line());
        for d in &r.details {
            println!("    {d}");
        }
        ok &= r.status.ok();
        reports.push(r.to_json());
    }
    if let Some(p) = out {
        emit(&json!({"checks": reports, "ok": ok}), Some(&p))?;
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}
