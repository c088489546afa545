use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

const BERNOULLI: &str = "[atoms]\n0 3/4\n1 1/4\n";
const ROOT_TWO: &str = "[atoms]\n0 1/2\nsqrt(2) 1/2\n";
const POINT: &str = "[atoms]\n0 1\n";
const SMALL_ATOM: &str = "\
# 0.001 delta_0 + 0.999 N(1, 1)
[mixing]
p = 0.001
lattice = 1

[atoms]
0 1

[density]
kind = gaussian
mean = 1
variance = 1
";

struct Dir(TempDir);

impl Dir {
    fn new() -> Self {
        Dir(tempfile::tempdir().unwrap())
    }

    fn spec(&self, name: &str, text: &str) -> PathBuf {
        let p = self.0.path().join(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }
}

fn qidlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qidlab"))
        .args(args)
        .env("QIDLAB_THREADS", "2")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn check_exit_codes() {
    let dir = Dir::new();
    let b = dir.spec("b.spec", BERNOULLI);
    let o = qidlab(&["check", b.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).starts_with("verdict: QID"));

    let r = dir.spec("r.spec", ROOT_TWO);
    let o = qidlab(&["check", r.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    let line = out.lines().find(|l| l.starts_with("zero certificate")).unwrap();
    let z: f64 = line.split(['(', ')']).nth(1).unwrap().parse().unwrap();
    assert!((z - 2.2214).abs() < 1e-4, "{line}");

    let bad = dir.spec("bad.spec", "[atoms]\n0 0.5\n1 zero\n");
    let o = qidlab(&["check", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let o = qidlab(&["check", dir.path("missing.spec").to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert_eq!(code(&qidlab(&["check"])), 3);
}

#[test]
fn undecided_verdict_has_its_own_code() {
    let dir = Dir::new();
    // inf |F| = 0.5 sits between the two tolerances.
    let b = dir.spec("b.spec", BERNOULLI);
    let o = qidlab(&["check", "--tol-qid", "0.9", b.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).starts_with("verdict: undecided"));
}

#[test]
fn triplet_files() {
    let dir = Dir::new();
    let b = dir.spec("b.spec", BERNOULLI);
    let out = dir.path("b.triplet");
    let o = qidlab(&["triplet", b.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("round trip"));
    let t = qidlab_core::triplet::parse_triplet(&fs::read_to_string(&out).unwrap()).unwrap();
    let c1 = t.atoms.iter().find(|a| a.0 == 1.0).unwrap().1;
    assert!((c1 - 1.0 / 3.0).abs() < 1e-12);
    assert_eq!(t.m, 0);

    let p = dir.spec("p.spec", POINT);
    let o = qidlab(&["triplet", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let t = qidlab_core::triplet::parse_triplet(&stdout(&o)).unwrap();
    assert!(t.atoms.is_empty() && t.h.is_empty() && t.gamma0 == 0.0 && t.m == 0);

    let s = dir.spec("s.spec", SMALL_ATOM);
    let o = qidlab(&["triplet", s.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let t = qidlab_core::triplet::parse_triplet(&stdout(&o)).unwrap();
    assert_ne!(t.m, 0);
    let line = stderr(&o);
    let err: f64 = line.split("= ").nth(1).unwrap().split_whitespace().next().unwrap().parse().unwrap();
    assert!(err < 1e-6, "{line}");

    let r = dir.spec("r.spec", ROOT_TWO);
    let o = qidlab(&["triplet", r.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("qid check"));
}

#[test]
fn moment_reports() {
    let dir = Dir::new();
    let b = dir.spec("b.spec", BERNOULLI);
    let o = qidlab(&["moments", b.to_str().unwrap(), "poly:3"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("consistent: true"));

    let s = dir.spec("s.spec", SMALL_ATOM);
    let o = qidlab(&["moments", s.to_str().unwrap(), "poly:2", "--csv"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), qidlab_core::MomentReport::CSV_HEADER);
    assert!(lines.next().unwrap().ends_with(",true"));

    let p = dir.spec("p.spec", POINT);
    let o = qidlab(&["moments", p.to_str().unwrap(), "subexp:0.5"]);
    assert_eq!(code(&o), 0);

    let o = qidlab(&["moments", b.to_str().unwrap(), "exp:1"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("GRS"));
}

fn rows(csv: &str, series: &str) -> Vec<(f64, f64)> {
    csv.lines()
        .skip(1)
        .filter(|l| l.starts_with(&format!("{series},")))
        .map(|l| {
            let f: Vec<f64> = l.split(',').skip(1).map(|v| v.parse().unwrap()).collect();
            (f[0], f[3])
        })
        .collect()
}

#[test]
fn plot_data() {
    let dir = Dir::new();
    let b = dir.spec("b.spec", BERNOULLI);
    let out = dir.path("b.csv");
    let o = qidlab(&[
        "plot-data",
        b.to_str().unwrap(),
        "--from",
        "-10",
        "--to",
        "10",
        "--points",
        "2001",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "series,x,re,im,modulus");
    let cf = rows(&csv, "cf");
    let at0 = cf.iter().find(|r| r.0 == 0.0).unwrap();
    assert_eq!(at0.1, 1.0);
    let min = cf.iter().filter(|r| r.0 > 0.0).fold((0.0, 2.0), |a, r| if r.1 < a.1 { *r } else { a });
    assert!((min.1 - 0.5).abs() < 1e-4 && (min.0 - std::f64::consts::PI).abs() < 0.02, "{min:?}");
    assert!(!rows(&csv, "nu_atom").is_empty());

    let s = dir.spec("s.spec", SMALL_ATOM);
    let o = qidlab(&["plot-data", s.to_str().unwrap(), "--from", "0", "--to", "20", "--points", "2001", "--nu-range", "0"]);
    assert_eq!(code(&o), 0);
    let cf = rows(&stdout(&o), "cf");
    let dip = cf.iter().fold((0.0, 2.0), |a, r| if r.1 < a.1 { *r } else { a });
    assert!((dip.0 - 3.7).abs() < 0.3, "{dip:?}");
    let tail = cf.iter().filter(|r| r.0 > 10.0).map(|r| r.1);
    assert!(tail.clone().all(|m| (m - 0.001).abs() < 1e-6));

    // Outputs are deterministic.
    let again = qidlab(&["plot-data", s.to_str().unwrap(), "--from", "0", "--to", "20", "--points", "2001", "--nu-range", "0"]);
    assert_eq!(again.stdout, o.stdout);

    let r = dir.spec("r.spec", ROOT_TWO);
    let o = qidlab(&["plot-data", r.to_str().unwrap(), "--points", "11"]);
    assert_eq!(code(&o), 0);
    assert!(rows(&stdout(&o), "nu").is_empty());
}
