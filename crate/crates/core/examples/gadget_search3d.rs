//! Brute-force search for cubic-lattice gate geometries built from a crossbar.

use tilework::compiler::gadget::{assemble, measure, Family, GadgetGeometry};
use tilework::compiler::port::{Io, Port, TruthConvention};
use tilework::lattice::Cell;
use tilework::solver::Budget;

fn units() -> Vec<Cell> {
    let mut v = Vec::new();
    for axis in 0..3 {
        for s in [1, -1] {
            v.push(Cell::unit(3, axis, s));
        }
    }
    v
}

fn candidates(name: &str, io: Io, anchor: Cell, core: &[Cell]) -> Vec<Port> {
    let mut out = Vec::new();
    for d in units() {
        let start = anchor.add(d);
        if core.contains(&start) {
            continue;
        }
        for a in units() {
            for b in units() {
                if a == b || a == b.neg() || a == d.neg() {
                    continue;
                }
                out.push(Port {
                    name: name.into(),
                    io,
                    convention: TruthConvention::Zigzag3d,
                    start,
                    moves: vec![a, b],
                    stub_len: 4,
                });
            }
        }
    }
    out
}

fn main() {
    let l = Cell::xyz(-1, 0, 0);
    let c = Cell::xyz(0, 0, 0);
    let r = Cell::xyz(1, 0, 0);
    let o = Cell::xyz(0, -1, 0);
    let core = vec![l, c, r, o];
    let pa = candidates("a", Io::In, l, &core);
    let pb = candidates("b", Io::In, r, &core);
    let po = candidates("out", Io::Out, o, &core);
    let mut found = 0;
    for a in &pa {
        for b in &pb {
            for out in &po {
                let ports = vec![a.clone(), b.clone(), out.clone()];
                let region = assemble(3, &core, &ports);
                if region.len() != core.len() + 12 {
                    continue;
                }
                let g = GadgetGeometry {
                    name: "gate".into(),
                    family: Family::DominoTromino3d,
                    region,
                    ports: ports.clone(),
                    truth_table: vec![],
                };
                let Ok(t) = measure(&g, Budget::nodes(100_000)) else { continue };
                let ok = t.iter().all(|(v, n)| {
                    let want = v[2] == (v[0] && v[1]);
                    n.as_ref().is_some_and(|n| (*n > 0u32.into()) == want)
                });
                if ok {
                    found += 1;
                    println!("FOUND");
                    for p in &ports {
                        println!("  {} {:?} start {} moves {:?}", p.name, p.io, p.start, p.moves);
                    }
                    println!("  {:?}", t);
                    if found > 3 {
                        return;
                    }
                }
            }
        }
    }
    println!("found {found}");
}
