use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tilework(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tilework"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn count_solve_and_enumerate() {
    let dir = tempfile::tempdir().unwrap();
    let rect = write(dir.path(), "r.txt", "dim 2\n0 0\n1 0\n2 0\n0 1\n1 1\n2 1\n");
    let o = tilework(&["count", "--region", &rect, "--tiles", "right_tromino"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "count 2\n");

    let o = tilework(&["enumerate", "--region", &rect, "--tiles", "right_tromino", "--limit", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("tilings 1\ntruncated true\n"));

    let o = tilework(&["solve", "--region", &rect, "--tiles", "right_tromino", "--render"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("result sat\n"));
    assert!(text.contains("AAB") || text.contains("ABB"));

    let odd = write(dir.path(), "odd.txt", "dim 2\n0 0\n1 0\n2 0\n");
    let o = tilework(&["solve", "--region", &odd, "--tiles", "domino2"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "result unsat\n");
}

#[test]
fn tiles_may_come_from_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let strip = write(dir.path(), "s.txt", "dim 2\n0 0\n1 0\n2 0\n3 0\n0 1\n1 1\n2 1\n3 1\n");
    let tiles = write(dir.path(), "t.txt", "tile domino2\n");
    let o = tilework(&["count", "--region", &strip, "--tiles", &tiles]);
    assert_eq!(stdout(&o), "count 5\n");
}

#[test]
fn errors_and_budgets_have_their_own_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = tilework(&["count", "--region", "/nonexistent/region", "--tiles", "domino2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("error "));
    assert_eq!(tilework(&["verify-gadget", "no_such_gadget"]).status.code(), Some(2));
    assert_eq!(tilework(&["frobnicate"]).status.code(), Some(2));

    let big = (0..8).flat_map(|y| (0..8).map(move |x| format!("{x} {y}\n"))).collect::<String>();
    let square = write(dir.path(), "sq.txt", &format!("dim 2\n{big}"));
    let o = tilework(&["count", "--region", &square, "--tiles", "domino2", "--max-nodes", "5"]);
    assert_eq!(o.status.code(), Some(3));
    let o = tilework(&["verify-gadget", "clause_node", "--max-nodes", "2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).ends_with("verdict inconclusive\n"));
}

#[test]
fn gadget_verification_prints_rows() {
    let o = tilework(&["verify-gadget", "and2d"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("row ")).count(), 8);
    assert!(text.contains("row a,b,out=111 expected 1 observed 1 pass"));
    assert!(text.ends_with("verdict pass\n"));
}

#[test]
fn compile_then_count() {
    let dir = tempfile::tempdir().unwrap();
    let net = write(dir.path(), "c.net", "input x\ninput y\nor g x y\noutput g\n");
    let out = dir.path().join("out");
    let o = tilework(&["compile-circuit2d", "--netlist", &net, "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("family tromino_square"));
    assert!(fs::read_to_string(out.join("provenance.txt")).unwrap().contains("gadget g#and and2d"));
    let region = out.join("region.txt");
    let tiles = out.join("tiles.txt");
    let o = tilework(&["count", "--region", region.to_str().unwrap(), "--tiles", tiles.to_str().unwrap()]);
    assert_eq!(stdout(&o), "count 3\n");
}

#[test]
fn formula_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let k4 = write(dir.path(), "k4.cnf", "p m13 4 4\n1 2 3 0\n1 2 4 0\n1 3 4 0\n2 3 4 0\n");
    let out = dir.path().join("k4");
    let o = tilework(&["compile-1in3", "--formula", &k4, "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let region = out.join("region.txt");
    let o = tilework(&["solve", "--region", region.to_str().unwrap(), "--tiles", "right_tromino"]);
    assert_eq!(o.status.code(), Some(1));

    let one = write(dir.path(), "one.cnf", "p m13 3 1\n1 2 3 0\n");
    let cubic = dir.path().join("cubic.cnf");
    let o = tilework(&["reduce-cubic", "--formula", &one, "-o", cubic.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(fs::read_to_string(&cubic).unwrap().starts_with("p m13 "));
    let o = tilework(&["verify-reduction", "--formula", &one]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn cubic_and_four_dimensional_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let net = write(dir.path(), "x.net", "input x\nnot n x\nand g x n\noutput g\n");
    let out = dir.path().join("x3");
    let o = tilework(&["compile-3d", "--netlist", &net, "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let region = out.join("region.txt");
    let o = tilework(&["solve", "--region", region.to_str().unwrap(), "--tiles", "domino3,straight_tromino3"]);
    assert_eq!(o.status.code(), Some(1));

    let slab = write(dir.path(), "slab.txt", "dim 3\n0 0 0\n1 0 0\n2 0 0\n0 1 0\n0 1 1\n0 0 1\n");
    let lifted = dir.path().join("lifted.txt");
    let o = tilework(&["lift-4d", "--region", &slab, "-o", lifted.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let a = tilework(&["count", "--region", &slab, "--tiles", "domino3,straight_tromino3"]);
    let b = tilework(&["count", "--region", lifted.to_str().unwrap(), "--tiles", "domino4,straight_tromino4"]);
    assert_eq!(stdout(&a), "count 2\n");
    assert_eq!(stdout(&a), stdout(&b));
}
