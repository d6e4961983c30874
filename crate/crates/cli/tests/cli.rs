use std::path::PathBuf;
use std::process::{Command, Output};

fn scatter(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scatter")).args(args).env_remove("SCATTER_CACHE_DIR").output().unwrap()
}

fn golden(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(p).unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn ks_basic_golden() {
    let out = stdout(&scatter(&["consistent", "--surface", "ks-basic", "--order", "4"]));
    assert_eq!(out, golden("ks-basic-order4.json"));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let outgoing: Vec<_> = v["rays"].as_array().unwrap().iter().filter(|r| r["kind"] == "outgoing").collect();
    assert_eq!(outgoing.len(), 3);
}

#[test]
fn dp5_golden_and_threads() {
    let one = stdout(&scatter(&["consistent", "--surface", "dP5", "--order", "3"]));
    assert_eq!(one, golden("dp5-order3.json"));
    let four = stdout(&scatter(&["--threads", "4", "consistent", "--surface", "dP5", "--order", "3"]));
    assert_eq!(one, four);
}

#[test]
fn theta_threads_identical() {
    let a = stdout(&scatter(&["theta", "--surface", "dP4", "--order", "5"]));
    let b = stdout(&scatter(&["theta", "--surface", "dP4", "--order", "5", "--threads", "3"]));
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["relations"].as_array().unwrap().len(), 2);
    assert_eq!(v["table"]["printedDiff"].as_array().unwrap().len(), 0);
}

#[test]
fn theta_single_pair_and_latex() {
    let dir = std::env::temp_dir().join(format!("scatter-cli-latex-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let tex = dir.join("t.tex");
    stdout(&scatter(&["theta", "--surface", "dP5", "--order", "3", "--latex", tex.to_str().unwrap()]));
    let t = std::fs::read_to_string(&tex).unwrap();
    assert!(t.starts_with("\\begin{tabular}") && t.contains("$dP_5$"));
    assert!(t.matches("\\vartheta_{").count() >= 15);
    let p = stdout(&scatter(&["theta", "--surface", "dP5", "--order", "3", "--pairs", "1,3"]));
    let v: serde_json::Value = serde_json::from_str(&p).unwrap();
    assert_eq!(v["pair"], serde_json::json!([1, 3]));
    assert!(!v["product"].as_array().unwrap().is_empty());
}

#[test]
fn exit_codes() {
    assert_eq!(scatter(&["consistent", "--surface", "nope", "--order", "3"]).status.code(), Some(2));
    assert_eq!(scatter(&["consistent", "--surface", "dP5", "--order", "0"]).status.code(), Some(2));
    assert_eq!(scatter(&["theta", "--surface", "dP5", "--order", "3", "--pairs", "1,9"]).status.code(), Some(2));
    assert_eq!(scatter(&["verify", "--only", "bogus"]).status.code(), Some(2));
    assert_eq!(scatter(&["--threads", "0", "fixtures", "list"]).status.code(), Some(2));
    // A tampered fixture is an internal consistency failure of the B-value check.
    assert_eq!(scatter(&["dp2-family", "--check-b-values", "--printed-fixture"]).status.code(), Some(3));
}

#[test]
fn verify_b_values() {
    let out = stdout(&scatter(&["verify", "--only", "b-values"]));
    assert!(out.contains("6561, 459, 27, 6561, 459, 27, 81, 81"), "{out}");
}

#[test]
fn verify_tampered_fixture_names_the_failure() {
    let o = scatter(&["verify", "--only", "b-values,family", "--printed-fixture"]);
    assert_ne!(o.status.code(), Some(0));
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("FAIL") && out.contains("b-values") && out.contains("B1(C) = 45"), "{out}");
}

#[test]
fn verify_default_passes() {
    let out = stdout(&scatter(&["verify"]));
    assert!(!out.contains("FAIL"), "{out}");
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 6, "{out}");
}

#[test]
fn dp2_family_feeds_jacobian() {
    let dir = std::env::temp_dir().join(format!("scatter-cli-fam-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let fam = dir.join("family.json");
    stdout(&scatter(&["dp2-family", "--check-b-values", "--out", fam.to_str().unwrap()]));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&fam).unwrap()).unwrap();
    assert_eq!(v["printedDiff"], serde_json::json!(["b8^2: computed 1 vs reference -1"]));
    let rep = stdout(&scatter(&["jacobian", "--family", fam.to_str().unwrap(), "--potential", "tC+tL"]));
    let r: serde_json::Value = serde_json::from_str(&rep).unwrap();
    assert_eq!(r["dimension"], 10);
    assert_eq!(r["monomialOrder"], "grevlex");
    assert_eq!(r["staircase"].as_array().unwrap().len(), 10);
}

#[test]
fn jacobian_explicit() {
    let p2 = stdout(&scatter(&["jacobian", "--vars", "x,y", "--potential", "x + y + 1/(x*y)", "--laurent"]));
    assert_eq!(serde_json::from_str::<serde_json::Value>(&p2).unwrap()["dimension"], 3);
    let inf = stdout(&scatter(&["jacobian", "--vars", "x,y,z", "--potential", "x*y"]));
    assert_eq!(serde_json::from_str::<serde_json::Value>(&inf).unwrap()["dimension"], "infinite");
}

#[test]
fn cache_dir_round_trip() {
    let dir = std::env::temp_dir().join(format!("scatter-cli-cache-{}", std::process::id()));
    let run = || {
        let o = Command::new(env!("CARGO_BIN_EXE_scatter"))
            .args(["consistent", "--surface", "dP5", "--order", "3"])
            .env("SCATTER_CACHE_DIR", &dir)
            .output()
            .unwrap();
        stdout(&o)
    };
    let first = run();
    assert!(dir.join("dP5-order3.json").exists());
    assert_eq!(first, run());
    assert_eq!(first, golden("dp5-order3.json"));
}

#[test]
fn fixtures_list() {
    let out = stdout(&scatter(&["fixtures", "list"]));
    for n in ["P2", "dP5", "dP4", "dP3", "dP2", "dP2-blown-up", "ks-basic"] {
        assert!(out.lines().any(|l| l.split_whitespace().next() == Some(n)), "{n}");
    }
}
