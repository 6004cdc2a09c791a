use std::path::PathBuf;

use jetcalc::io::run_cli;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn run(args: &[&str]) -> (i32, String) {
    run_cli(std::iter::once("jetcalc").chain(args.iter().copied()))
}

fn scratch_file(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("jetcalc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn same_argv_same_report() {
    let f = fixture("nongorenstein.jet");
    let args = ["hasse", f.as_str(), "--order", "3", "--seed", "11"];
    assert_eq!(run(&args), run(&args));
    let (code, out) = run(&args);
    assert_eq!(code, 0);
    assert!(out.contains("h_1(x) = 3*y*n1\n"));
    assert!(out.ends_with("VERDICT hasse PASS\n"));
}

#[test]
fn solve_connection_exit_codes() {
    let (code, out) = run(&["solve-connection", &fixture("nodal.jet"), "--degree", "0"]);
    assert_eq!(code, 1);
    assert!(out.contains("obstruction in relation 1 at weight 2: (dx@dy) + (dy@dx)"));
    assert!(out.contains("certificate: no connection of any degree"));
    let (code, out) = run(&["solve-connection", &fixture("nongorenstein.jet"), "--degree", "-1", "--flat"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("VERDICT solve-connection FEASIBLE"));
}

#[test]
fn checks_on_files() {
    for cmd in ["validate", "check-derivation", "check-connection", "check-flat"] {
        let (code, out) = run(&[cmd, &fixture("nongorenstein.jet")]);
        assert_eq!(code, 0, "{cmd}: {out}");
        assert!(out.contains(&format!("VERDICT {cmd} PASS")));
    }
    let (code, out) = run(&["extend", &fixture("nongorenstein.jet"), "--order", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("T_2(n2) = 12*x*(n1@n2@n2)"));
}

#[test]
fn compare_and_cocycle() {
    let (code, out) = run(&["compare", &fixture("taylor.jet"), &fixture("taylor_nu1.jet"), "--order", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("lambda_1(e1) = 1/2*(e1@e1)"));
    let files = ["taylor_nu1.jet", "taylor_nu2.jet", "taylor_nu3.jet"].map(fixture);
    let (code, out) = run(&["cocycle", &files[0], &files[1], &files[2], "--order", "4"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("cocycle: ok"));
}

#[test]
fn mathematical_negatives_exit_one() {
    let nonflat = "[ring]\nvars = x1:1, x2:1\n[module]\ngens = e1:0, e2:0\n[derivation]\ndegree = -1\n\
                   D(x1) = e1\nD(x2) = e2\n[connection]\nG(e1) = (e1@e2) - (e2@e1)\n";
    let p = scratch_file("nonflat.jet", nonflat);
    let (code, out) = run(&["check-flat", &p]);
    assert_eq!(code, 1);
    assert!(out.contains("not symmetric at x1"));
    let (code, _) = run(&["extend", &p]);
    assert_eq!(code, 1);
    let broken = "[ring]\nvars = x:1, y:1\nideal = x*y\n[module]\ngens = dx:1, dy:1\nrels = y*dx + x*dy\n\
                  [derivation]\ndegree = 0\nD(x) = dx\nD(y) = dy\n[connection]\nG(dx) = 0\nG(dy) = 0\n";
    let p = scratch_file("broken.jet", broken);
    let (code, out) = run(&["check-connection", &p]);
    assert_eq!(code, 1);
    assert!(out.contains("relation 1 is not respected: (dx@dy) + (dy@dx)"));
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(run(&["validate", "/nonexistent/file.jet"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["demo", "elliptic"]).0, 2);
    let p = scratch_file("bad.jet", "[ring]\nvars = x:1\n[module]\ngens = e:0\n[derivation]\nD(x) = e +\n");
    let (code, out) = run(&["validate", &p]);
    assert_eq!(code, 2);
    assert!(out.starts_with("error: "));
    let (code, _) = run(&["solve-connection", &fixture("taylor.jet")]);
    assert_eq!(code, 2);
    let (code, _) = run(&["compare", &fixture("taylor.jet"), &fixture("nongorenstein.jet")]);
    assert_eq!(code, 2);
    assert_eq!(run(&["--help"]).0, 0);
}
