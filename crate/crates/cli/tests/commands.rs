use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Self { dir: tempfile::tempdir().unwrap() }
    }

    fn spec(&self, name: &str, json: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, json).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn mrd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mrd")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

const PARETO3: &str = r#"{"family":"pareto1","L":1,"k":3}"#;
const MIXTURE: &str = r#"{"op":"mixture","weights":[W1,W2],"components":[
    {"family":"uniform","L":1,"H":2},{"family":"uniform","L":3,"H":4}]}"#;

fn mixture(w: f64) -> String {
    MIXTURE.replace("W1", &w.to_string()).replace("W2", &(1.0 - w).to_string())
}

#[test]
fn analyze_reports_classes_and_limits() {
    let ws = Workspace::new();
    let bs = ws.spec("bs.json", r#"{"family":"birnbaum_saunders","a":6,"beta":5}"#);
    let o = mrd(&["analyze", bs.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["dgmrd"]["verdict"], "holds");
    assert_eq!(v["igfr"]["verdict"], "fails-with-witness");

    let p = ws.spec("p.json", PARETO3);
    let v = json(&mrd(&["analyze", p.to_str().unwrap()]));
    assert!((v["c"].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert!((v["kappa"].as_f64().unwrap() - 3.0).abs() < 1e-6);

    let m = ws.spec("m.json", &mixture(0.75));
    let v = json(&mrd(&["analyze", m.to_str().unwrap()]));
    assert_eq!(v["dgmrd"]["verdict"], "fails-with-witness");
    let w: Vec<f64> = v["dgmrd"]["witness"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!(w.iter().all(|&x| (1.0..=2.0).contains(&x)), "{w:?}");
}

#[test]
fn price_solutions_and_exit_codes() {
    let ws = Workspace::new();
    let p = ws.spec("p.json", PARETO3);
    let o = mrd(&["price", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!((json(&o)["optimal_price"].as_f64().unwrap() - 0.75).abs() < 1e-6);

    let u = ws.spec("u.json", r#"{"family":"uniform","L":0,"H":1}"#);
    let v = json(&mrd(&["price", u.to_str().unwrap()]));
    assert!((v["optimal_price"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-8);

    let d = ws.spec("d.json", r#"{"family":"pareto1","L":1,"k":1.5}"#);
    let o = mrd(&["price", d.to_str().unwrap()]);
    assert_eq!(code(&o), 4);
    assert_eq!(json(&o)["optimal_price"], "none");
    assert!(String::from_utf8_lossy(&o.stderr).contains("no-finite-maximizer"));
}

#[test]
fn input_errors_exit_2() {
    let ws = Workspace::new();
    let missing = ws.path("absent.json");
    assert_eq!(code(&mrd(&["price", missing.to_str().unwrap()])), 2);
    for bad in [
        "{",
        r#"{"family":"pareto1","L":1,"k":1}"#,
        r#"{"op":"scale","factor":-1,"of":{"family":"exponential","rate":1}}"#,
    ] {
        let s = ws.spec("bad.json", bad);
        assert_eq!(code(&mrd(&["analyze", s.to_str().unwrap()])), 2, "{bad}");
    }
    let p = ws.spec("p.json", PARETO3);
    let p = p.to_str().unwrap();
    assert_eq!(code(&mrd(&["price", p, "--set", "grid_points=4"])), 2);
    assert_eq!(code(&mrd(&["price", p, "--set", "no_such_key=1"])), 2);
    assert_eq!(code(&mrd(&["price", p, "--set", "quad_rel_tol"])), 2);
    assert_eq!(code(&mrd(&["curve", p, "--functions", "m,q"])), 2);
}

#[test]
fn curve_csv_and_missing_density() {
    let ws = Workspace::new();
    let p = ws.spec("p.json", PARETO3);
    let out = ws.path("curve.csv");
    let o =
        mrd(&["curve", p.to_str().unwrap(), "--functions", "eps,l", "--grid", "64", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p,l,eps");
    assert_eq!(lines.len(), 65);
    for line in &lines[1..] {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((f[1] * f[2] - 1.0).abs() < 1e-10);
    }

    let conv = ws.spec(
        "conv.json",
        r#"{"op":"convolve","of":[{"family":"exponential","rate":1},{"family":"exponential","rate":2}]}"#,
    );
    let o = mrd(&["curve", conv.to_str().unwrap(), "--functions", "g"]);
    assert_eq!(code(&o), 5);
    let o = mrd(&["curve", conv.to_str().unwrap(), "--grid", "32"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().next().unwrap(), "p,m,l,eps,R");
}

#[test]
fn validate_emits_json_lines() {
    let ws = Workspace::new();
    let m = ws.spec("m.json", &mixture(0.25));
    let o = mrd(&["validate", m.to_str().unwrap(), "--n", "200000", "--seed", "9", "--prices", "2.5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["check"], "revenue");
    assert!((v["analytic"].as_f64().unwrap() - 2.5 * 0.75).abs() < 1e-12);

    let u = ws.spec("u.json", r#"{"family":"uniform","L":0,"H":1}"#);
    let o = mrd(&["validate", u.to_str().unwrap(), "--n", "100000"]);
    assert_eq!(code(&o), 0);
    let lines: Vec<Value> =
        String::from_utf8_lossy(&o.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 5);
    assert!(lines.iter().all(|l| l["pass"] == true));

    assert_eq!(code(&mrd(&["validate", u.to_str().unwrap(), "--n", "10"])), 2);

    // Infinite variance: a thousand draws badly underestimate the surplus.
    let heavy = ws.spec("heavy.json", r#"{"family":"pareto1","L":1,"k":1.05}"#);
    let o = mrd(&["validate", heavy.to_str().unwrap(), "--n", "1000", "--seed", "0", "--prices", "3"]);
    assert_eq!(code(&o), 6);
    assert_eq!(json(&o)["pass"], false);
}

#[test]
fn commands_are_deterministic() {
    let ws = Workspace::new();
    let p = ws.spec("bs.json", r#"{"family":"birnbaum_saunders","a":6,"beta":5}"#);
    for args in [["price", "--seed", "1"], ["analyze", "--seed", "1"], ["validate", "--n", "20000"]] {
        let mut full = vec![args[0], p.to_str().unwrap()];
        full.extend(&args[1..]);
        let a = mrd(&full);
        let b = mrd(&full);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
