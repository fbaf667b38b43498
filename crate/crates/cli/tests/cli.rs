use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ffalg::fixtures;
use ffalg::Coding;
use serde_json::Value;
use tempfile::TempDir;

fn ffalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffalg")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "failed: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    let v: Value = serde_json::from_str(&stdout(o)).unwrap();
    assert_eq!(v["schema"], 1);
    v
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn body_lines(text: &str) -> Vec<String> {
    text.lines().filter(|l| !l.starts_with('#')).map(str::to_string).collect()
}

#[test]
fn gb_reproduces_l8_bases() {
    let dir = TempDir::new().unwrap();
    let d = write(&dir, "l8.design", &fixtures::l8().to_text());
    let lex = stdout(&ffalg(&["gb", "--design", s(&d), "--order", "lex"]));
    assert!(lex.starts_with("# order=lex vars=x1>x2>x3>x4>x5>x6>x7\n"));
    let got: BTreeSet<String> = body_lines(&lex).into_iter().collect();
    let want: BTreeSet<String> = fixtures::L8_GB_LEX.iter().map(|l| l.to_string()).collect();
    assert_eq!(got, want);
    let grevlex = stdout(&ffalg(&["gb", "--design", s(&d), "--order", "grevlex"]));
    let got: BTreeSet<String> = body_lines(&grevlex).into_iter().collect();
    let want: BTreeSet<String> = fixtures::L8_GB_GREVLEX.iter().map(|l| l.to_string()).collect();
    assert_eq!(got, want);
}

#[test]
fn printed_bases_reparse_identically() {
    let dir = TempDir::new().unwrap();
    let d = write(&dir, "l8.design", &fixtures::l8().to_text());
    let vars = "x1,x2,x3,x4,x5,x6,x7";
    for order in ["lex", "grevlex"] {
        let first = stdout(&ffalg(&["gb", "--design", s(&d), "--order", order]));
        let p = write(&dir, "gb.txt", &first);
        let again = stdout(&ffalg(&["ideal", "--input", s(&p), "--vars", vars, "--order", order]));
        assert_eq!(first, again);
    }
}

#[test]
fn ideal_eliminates_a_parameter() {
    // the twisted cubic and its implicit equations
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "gens.txt", "x - t\ny - t^2\nz - t^3\n");
    let out = stdout(&ffalg(&[
        "ideal", "--input", s(&p), "--vars", "t,x,y,z", "--order", "block:lex(t)>grevlex(x,y,z)", "--eliminate", "t",
    ]));
    let lines = body_lines(&out);
    assert_eq!(lines.len(), 3);
    assert!(lines.iter().all(|l| !l.contains('t')));
    assert!(lines.contains(&"y^2 - x*z".to_string()));
}

#[test]
fn est_lists_standard_monomials() {
    let dir = TempDir::new().unwrap();
    let d = write(&dir, "l8.design", &fixtures::l8().to_text());
    let out = stdout(&ffalg(&["est", "--design", s(&d), "--order", "grevlex"]));
    assert_eq!(out, "1\nx1\nx2\nx3\nx4\nx5\nx6\nx7\n");
    let out = stdout(&ffalg(&["est", "--design", s(&d), "--order", "lex"]));
    assert_eq!(out, "1\nx5\nx6\nx7\nx5*x6\nx5*x7\nx6*x7\nx5*x6*x7\n");
}

#[test]
fn alias_query_and_table() {
    let dir = TempDir::new().unwrap();
    let d = write(&dir, "l8.design", &fixtures::l8().to_text());
    let v = json(&ffalg(&["alias", "--design", s(&d), "--query", "x3,x1*x2"]));
    assert_eq!(v["confounded"], -1);
    assert!(v["certificate"].as_array().is_some_and(|c| !c.is_empty()));
    let v = json(&ffalg(&["alias", "--design", s(&d), "--query", "x1,x2"]));
    assert!(v["confounded"].is_null());
    let v = json(&ffalg(&["alias", "--design", s(&d), "--max-degree", "2"]));
    assert_eq!(v["classes"].as_array().unwrap().len(), 8);
}

#[test]
fn indicator_classify_and_addfactors() {
    let dir = TempDir::new().unwrap();
    for (name, d, class) in [
        ("f1", fixtures::f1(), "regular"),
        ("f2", fixtures::f2(), "subset-fractional"),
        ("f3", fixtures::f3(), "affinely-full-dimensional"),
    ] {
        let p = write(&dir, &format!("{name}.design"), &d.to_text());
        assert_eq!(json(&ffalg(&["classify", "--design", s(&p)]))["class"], class);
        let ind = stdout(&ffalg(&["indicator", "--design", s(&p)]));
        let ip = write(&dir, &format!("{name}.ind"), &ind);
        let back = stdout(&ffalg(&["indicator", "--indicator", s(&ip)]));
        let back = ffalg::Design::parse(&back).unwrap();
        assert!(back.same_runs(&d));
    }
    let full = write(&dir, "full2.design", &fixtures::full_2x2().to_text());
    let out = stdout(&ffalg(&["addfactors", "--design", s(&full), "--relation", "x3=x1*x2"]));
    assert!(ffalg::Design::parse(&out).unwrap().same_runs(&fixtures::f1()));
    let ind = stdout(&ffalg(&["addfactors", "--design", s(&full), "--relation", "x3=x1*x2", "--indicator"]));
    assert_eq!(ind, "m=3\n1/2*x1*x2*x3 + 1/2\n");
    let bad = ffalg(&["addfactors", "--design", s(&full), "--relation", "x4=x1"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("--relation"));
}

#[test]
fn conditional_tests_agree() {
    let dir = TempDir::new().unwrap();
    let d = write(&dir, "d.design", &fixtures::full_2x2().to_text());
    let m = write(&dir, "m.model", "1\nx1\nx2\n");
    let y = write(&dir, "y.txt", "0 2 2 0\n");
    let common = ["--design", s(&d), "--model", s(&m), "--y", s(&y), "--stat", "pearson"];
    let exact = json(&ffalg(&[&["exact"], &common[..]].concat()));
    assert_eq!(exact["p_exact"], "1/3");
    let mc_args = [&["mctest"], &common[..], &["--seed", "7"]].concat();
    let mc = json(&ffalg(&mc_args));
    let (p, se) = (mc["p"].as_f64().unwrap(), mc["se"].as_f64().unwrap());
    assert!((p - 1.0 / 3.0).abs() <= 3.0 * se, "p={p} se={se}");
    assert!((p - 1.0 / 3.0).abs() <= 0.02);
    assert_eq!(mc["basis_size"], 1);
    assert_eq!(mc["chain"]["seed"], 7);
    assert_eq!(stdout(&ffalg(&mc_args)), serde_json::to_string_pretty(&mc).unwrap() + "\n");

    let basis = stdout(&ffalg(&["basis", "--design", s(&d), "--model", s(&m)]));
    assert_eq!(basis.lines().count(), 2);
}

#[test]
fn three_level_contrasts_share_fibers() {
    let dir = TempDir::new().unwrap();
    let y = write(&dir, "y.txt", "2 0 1 0 3 1 1 0 2\n");
    let mut ps = Vec::new();
    for (coding, contrast) in [
        (Coding::IntegerLevels, "baseline"),
        (Coding::IntegerLevels, "symmetric"),
        (Coding::ComplexRoots, "complex"),
    ] {
        let d = write(&dir, "d.design", &fixtures::design_3_3_1(coding).to_text());
        let m = write(&dir, "m.model", &format!("contrast={contrast}\n1\nx1\nx2\nx3\n"));
        let v = json(&ffalg(&["exact", "--design", s(&d), "--model", s(&m), "--y", s(&y)]));
        ps.push((v["p_exact"].clone(), v["fiber_size"].clone()));
    }
    assert_eq!(ps[0], ps[1]);
    assert_eq!(ps[0], ps[2]);
}

#[test]
fn estimability_error_names_terms() {
    let dir = TempDir::new().unwrap();
    let d = write(&dir, "d.design", &fixtures::design_2_7_3().to_text());
    let m = write(&dir, "m.model", "1\nx1\nx2\nx3\nx4\nx5\nx6\nx7\nx1*x2\nx4*x5\n");
    let o = ffalg(&["model", "--design", s(&d), "--model", s(&m)]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("x4*x5") && err.contains("x1*x2"), "{err}");
}

#[test]
fn exit_codes_and_line_numbers() {
    let dir = TempDir::new().unwrap();
    let d = write(&dir, "bad.design", "m=2 s=2\n1 1\n1 2\n");
    let o = ffalg(&["gb", "--design", s(&d)]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("--design") && err.contains("line 3"), "{err}");

    let d = write(&dir, "d.design", &fixtures::full_2x2().to_text());
    let m = write(&dir, "m.model", "1\nx1\nx2\n");
    let y = write(&dir, "y.txt", "0 2 2 0\n");
    let o = ffalg(&["mctest", "--design", s(&d), "--model", s(&m), "--y", s(&y)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--seed"));

    let y = write(&dir, "short.txt", "0 2\n");
    let o = ffalg(&["exact", "--design", s(&d), "--model", s(&m), "--y", s(&y)]);
    assert_eq!(o.status.code(), Some(2));

    let o = ffalg(&["doptimal", "--m", "6", "--n", "12"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn doptimal_report() {
    let v = json(&ffalg(&["doptimal", "--m", "3", "--n", "4", "--list"]));
    assert_eq!(v["optimum"], 256);
    assert_eq!(v["count"], 2);
    assert_eq!(v["histogram"]["regular"], 2);
    assert_eq!(v["designs"].as_array().unwrap().len(), 2);
    let g = json(&ffalg(&["doptimal", "--m", "4", "--greedy", "--seed", "3"]));
    assert_eq!(g["mode"], "greedy-exchange");
    assert!(g["optimum"].as_u64().unwrap() > 0);
}
