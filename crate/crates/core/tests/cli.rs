use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use coconvex::coconvex::BodyDoc;
use coconvex::measures::MeasureDoc;
use coconvex::solver::SolutionDoc;
use coconvex::{CFullSet, Cone, DiscreteMeasure};

const QUADRANT: &str = r#"{"dim":2,"generators":[[1.0,0.0],[0.0,1.0]]}"#;
const TWO_ATOMS: &str = r#"{"atoms":[{"u":[-0.6,-0.8],"mass":1.0},{"u":[-0.8,-0.6],"mass":1.0}]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coconvex")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn solve_two_atoms() {
    let dir = tempfile::tempdir().unwrap();
    let cone = write(dir.path(), "cone.json", QUADRANT);
    let measure = write(dir.path(), "phi.json", TWO_ATOMS);
    let out = dir.path().join("sol.json");
    let o = run(&["solve", "--cone", s(&cone), "--measure", s(&measure), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: SolutionDoc = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(doc.converged);
    assert_eq!(doc.atoms.len(), 2);
    for a in &doc.atoms {
        assert!((a.h + 0.84).abs() < 1e-9);
    }
    assert!((doc.coconvex_volume - 0.84).abs() < 1e-9);
}

#[test]
fn lp_dist_prints_twelve_digits() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", r#"{"atoms":[{"u":[-0.6,-0.8],"mass":0.5}]}"#);
    let b = write(dir.path(), "b.json", r#"{"atoms":[{"u":[-0.6,-0.8],"mass":0.3}]}"#);
    let o = run(&["lp-dist", s(&a), s(&b)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "0.2");
}

#[test]
fn atom_outside_the_window_is_invalid_input() {
    let dir = tempfile::tempdir().unwrap();
    let cone = write(dir.path(), "cone.json", QUADRANT);
    let measure = write(
        dir.path(),
        "phi.json",
        r#"{"atoms":[{"u":[-0.6,-0.8],"mass":1.0},{"u":[0.6,-0.8],"mass":1.0}]}"#,
    );
    let out = dir.path().join("sol.json");
    let o = run(&["solve", "--cone", s(&cone), "--measure", s(&measure), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("atom 1"), "{err}");
    assert!(!out.exists());
}

#[test]
fn malformed_documents_and_arguments() {
    let dir = tempfile::tempdir().unwrap();
    let cone = write(dir.path(), "cone.json", "{\"dim\": 2");
    let measure = write(dir.path(), "phi.json", TWO_ATOMS);
    let out = dir.path().join("sol.json");
    let o = run(&["solve", "--cone", s(&cone), "--measure", s(&measure), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    // stability runs need an explicit seed
    let o = run(&["stability", "--cone", s(&cone), "--measure", s(&measure), "--jitter", "0.01", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn iteration_cap_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let cone = write(dir.path(), "cone.json", QUADRANT);
    let m = r#"{"atoms":[{"u":[-0.6,-0.8],"mass":1.0},{"u":[-0.8,-0.6],"mass":0.2},{"u":[-0.7071067811865476,-0.7071067811865476],"mass":3.0}]}"#;
    let measure = write(dir.path(), "phi.json", m);
    let out = dir.path().join("sol.json");
    let o = run(&["solve", "--cone", s(&cone), "--measure", s(&measure), "--out", s(&out), "--max-iter", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn outputs_are_deterministic_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cone = write(dir.path(), "cone.json", QUADRANT);
    let measure = write(dir.path(), "phi.json", TWO_ATOMS);
    let (o1, o2) = (dir.path().join("s1.json"), dir.path().join("s2.json"));
    for out in [&o1, &o2] {
        let o = run(&["solve", "--cone", s(&cone), "--measure", s(&measure), "--out", s(out), "--seed", "7"]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(fs::read(&o1).unwrap(), fs::read(&o2).unwrap());

    // solution → body → sam → measure, each re-parsed and re-validated
    let sol: SolutionDoc = serde_json::from_str(&fs::read_to_string(&o1).unwrap()).unwrap();
    let atoms: Vec<String> = sol
        .atoms
        .iter()
        .map(|a| format!("{{\"u\":[{:?},{:?}],\"h\":{:?}}}", a.u[0], a.u[1], a.h))
        .collect();
    let body = write(dir.path(), "body.json", &format!("{{\"atoms\":[{}]}}", atoms.join(",")));
    let sam = dir.path().join("sam.json");
    let o = run(&["sam", "--cone", s(&cone), "--body", s(&body), "--out", s(&sam)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: MeasureDoc = serde_json::from_str(&fs::read_to_string(&sam).unwrap()).unwrap();
    let mu = DiscreteMeasure::from_doc(&doc).unwrap();
    assert!((mu.total() - 2.0).abs() < 1e-9);
    let o = run(&["lp-dist", s(&sam), s(&measure)]);
    assert!(stdout(&o).trim().parse::<f64>().unwrap() < 1e-9);

    let q = Cone::from_doc(&serde_json::from_str(QUADRANT).unwrap()).unwrap();
    let bd: BodyDoc = serde_json::from_str(&fs::read_to_string(&body).unwrap()).unwrap();
    let k = CFullSet::from_doc(&bd, Some(&q)).unwrap();
    let again: BodyDoc = serde_json::from_str(&serde_json::to_string(&k.to_doc()).unwrap()).unwrap();
    assert!(CFullSet::from_doc(&again, None).is_ok());

    let o = run(&["volume", "--cone", s(&cone), "--body", s(&body), "--method", "both"]);
    let text = stdout(&o);
    let vals: Vec<f64> = text.lines().map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap()).collect();
    assert!(vals.iter().all(|v| (v - 0.84).abs() < 1e-9), "{text}");
    let o = run(&["hausdorff", "--cone", s(&cone), s(&body), s(&body)]);
    assert_eq!(stdout(&o).trim(), "0");
    let o = run(&["bounds", "--cone", s(&cone), "--body", s(&body), "--bound", "2"]);
    let rep: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rep["all_checks_pass"], serde_json::Value::Bool(true));
}

#[test]
fn stability_csv_is_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let cone = write(dir.path(), "cone.json", QUADRANT);
    let measure = write(dir.path(), "phi.json", TWO_ATOMS);
    let (c1, c2) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let mut printed = Vec::new();
    for out in [&c1, &c2] {
        let args = ["stability", "--cone", s(&cone), "--measure", s(&measure), "--jitter", "0.01", "--trials", "10", "--seed", "3", "--out", s(out)];
        let o = run(&args);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        printed.push(stdout(&o));
    }
    assert_eq!(printed[0], printed[1]);
    let csv = fs::read_to_string(&c1).unwrap();
    assert_eq!(csv, fs::read_to_string(&c2).unwrap());
    let c_hat: f64 = printed[0].lines().next().unwrap().split_whitespace().nth(1).unwrap().parse().unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("trial,jitter,lp,dh,ratio"));
    let mut rows = 0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let (lp, dh): (f64, f64) = (f[2].parse().unwrap(), f[3].parse().unwrap());
        assert!(lp >= 0.0 && dh >= 0.0);
        if lp > 0.0 {
            assert!(dh <= c_hat * lp.sqrt() * (1.0 + 1e-9) + 1e-15, "{line}");
        }
        rows += 1;
    }
    assert_eq!(rows, 60);
}

#[test]
fn series_and_profile() {
    let o = run(&["orthant-series", "--n", "100"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("paper_series ") && text.contains("\nexact_series "));

    let dir = tempfile::tempdir().unwrap();
    let cone = write(dir.path(), "cone.json", QUADRANT);
    let measure = write(dir.path(), "phi.json", TWO_ATOMS);
    let o = run(&["necessary-profile", "--cone", s(&cone), "--measure", s(&measure), "--decades", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let prof: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(prof["unbounded_suspect"], serde_json::Value::Bool(false));

    let o = run(&["exhaust", "--cone", s(&cone), "--measure", s(&measure), "--margins", "0.3,0.1,0.01"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("delta,atoms,converged,residual_inf,volume,volume_bound,bound_holds,clearance,hausdorff_to_previous")
    );
    assert_eq!(lines.count(), 3);
}
