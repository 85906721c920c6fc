//! Brute-force search for square-lattice gadget geometries.
//!
//! For a fixed core and a list of candidate attachments per port (start cell
//! plus outward move cycle), tries every combination and prints those whose
//! measured truth table matches the target.

use std::collections::BTreeMap;

use tilework::compiler::gadget::{assemble, measure, Family, GadgetGeometry};
use tilework::compiler::port::{Io, Port, TruthConvention};
use tilework::lattice::Cell;
use tilework::solver::Budget;

const U: Cell = Cell::xy(0, 1);
const D: Cell = Cell::xy(0, -1);
const L: Cell = Cell::xy(-1, 0);
const R: Cell = Cell::xy(1, 0);

fn cycles(a: Cell, b: Cell) -> Vec<Vec<Cell>> {
    // knight cycles a,b,a / b,a,b in every rotation
    let mut out = Vec::new();
    for base in [[a, b, a], [b, a, b]] {
        for r in 0..3 {
            out.push((0..3).map(|i| base[(i + r) % 3]).collect());
        }
    }
    out
}

fn port(name: &str, io: Io, start: Cell, moves: Vec<Cell>) -> Port {
    Port {
        name: name.into(),
        io,
        convention: TruthConvention::Knight2d,
        start,
        moves,
        stub_len: 4,
    }
}

type Cand = (Cell, (Cell, Cell));

fn search(
    family: Family,
    core: &[Cell],
    specs: &[(&str, Io, Vec<Cand>)],
    target: &dyn Fn(&[bool]) -> Option<u64>,
) {
    search_extra(family, core, &[], specs, target)
}

fn search_extra(
    family: Family,
    fixed: &[Cell],
    extra: &[Cell],
    specs: &[(&str, Io, Vec<Cand>)],
    target: &dyn Fn(&[bool]) -> Option<u64>,
) {
    for mask in 0u32..(1 << extra.len()) {
        let mut core = fixed.to_vec();
        core.extend((0..extra.len()).filter(|i| mask >> i & 1 == 1).map(|i| extra[i]));
        if search_core(family, &core, specs, target) {
            return;
        }
    }
    println!("exhausted");
}

fn search_core(
    family: Family,
    core: &[Cell],
    specs: &[(&str, Io, Vec<Cand>)],
    target: &dyn Fn(&[bool]) -> Option<u64>,
) -> bool {
    let mut options: Vec<Vec<Port>> = Vec::new();
    for (name, io, cands) in specs {
        let mut v = Vec::new();
        for &(start, (a, b)) in cands {
            for cyc in cycles(a, b) {
                v.push(port(name, *io, start, cyc));
            }
        }
        options.push(v);
    }
    let mut idx = vec![0usize; options.len()];
    let mut found = 0;
    let mut seen_core = false;
    'outer: loop {
        let ports: Vec<Port> = idx.iter().zip(&options).map(|(&i, o)| o[i].clone()).collect();
        let region = assemble(2, core, &ports);
        let overlap = ports.iter().any(|p| p.stub().iter().any(|c| core.contains(c)));
        if overlap || region.len() != core.len() + ports.iter().map(|p| p.stub_len).sum::<usize>() {
            if !advance(&mut idx, &options) { break; }
            continue 'outer;
        }
        let g = GadgetGeometry {
            name: "cand".into(),
            family,
            region,
            ports: ports.clone(),
            truth_table: vec![],
        };
        if let Ok(table) = measure(&g, Budget::nodes(100_000)) {
            let ok = table.iter().all(|(vals, n)| {
                let want = target(vals).unwrap_or(0);
                n.as_ref().is_some_and(|n| *n == want.into())
            });
            if ok {
                found += 1;
                if !seen_core {
                    println!("CORE {:?}", core);
                    seen_core = true;
                }
                println!("FOUND #{found}");
                for p in &ports {
                    println!("  {} {:?} start {} moves {:?}", p.name, p.io, p.start, p.moves);
                }
                let t: BTreeMap<_, _> = table.into_iter().collect();
                println!("  {:?}", t);
                if found >= 2 {
                    return true;
                }
            }
        }
        if !advance(&mut idx, &options) {
            break;
        }
    }
    found > 0
}

fn advance(idx: &mut [usize], options: &[Vec<Port>]) -> bool {
    for k in 0..idx.len() {
        idx[k] += 1;
        if idx[k] < options[k].len() {
            return true;
        }
        idx[k] = 0;
    }
    false
}

fn main() {
    let which = std::env::args().nth(1).unwrap_or_default();
    let q = [Cell::xy(0, 0), Cell::xy(1, 0), Cell::xy(0, 1), Cell::xy(1, 1)];
    match which.as_str() {
        "and" => search(
            Family::TrominoSquare,
            &q,
            &[
                ("a", Io::In, vec![(Cell::xy(-1, 1), (U, L)), (Cell::xy(0, 2), (U, L))]),
                ("b", Io::In, vec![(Cell::xy(2, 1), (U, R)), (Cell::xy(1, 2), (U, R))]),
                ("out", Io::Out, vec![(Cell::xy(0, -1), (D, L)), (Cell::xy(0, -1), (D, R))]),
            ],
            &|v| if v[2] == (v[0] && v[1]) { Some(1) } else { None },
        ),
        "not" => search_extra(
            Family::TrominoSquare,
            &q,
            &box3_extra(),
            &[
                ("in", Io::In, side(Side::Top, 3)),
                ("out", Io::Out, side(Side::Bottom, 3)),
            ],
            &|v| if v[1] != v[0] { Some(1) } else { None },
        ),
        "split" => search_extra(
            Family::TrominoSquare,
            &q,
            &box3_extra(),
            &[
                ("in", Io::In, side(Side::Top, 3)),
                ("o1", Io::Out, side(Side::Left, 3)),
                ("o2", Io::Out, [side(Side::Bottom, 3), side(Side::Right, 3)].concat()),
            ],
            &|v| if v[1] == v[0] && v[2] == v[0] { Some(1) } else { None },
        ),
        "bulb" => search_extra(
            Family::TrominoSquare,
            &[Cell::xy(0, 0)],
            &box3_extra_all(),
            &[("out", Io::Out, side(Side::Bottom, 3))],
            &|_| Some(1),
        ),
        "tbulb" => search_extra(
            Family::Tromino,
            &[Cell::xy(0, 0)],
            &box3_extra_all(),
            &[("out", Io::Out, side(Side::Bottom, 3))],
            &|_| Some(1),
        ),
        "varnode" => search_extra(
            Family::Tromino,
            &q,
            &box3_extra(),
            &[
                ("o1", Io::Out, side(Side::Top, 3)),
                ("o2", Io::Out, side(Side::Left, 3)),
                ("o3", Io::Out, side(Side::Bottom, 3)),
            ],
            &|v| if v[1] == v[0] && v[2] == v[0] { Some(1) } else { None },
        ),
        "clause" => search_extra(
            Family::Tromino,
            &q,
            &box3_extra(),
            &[
                ("i1", Io::In, side(Side::Top, 3)),
                ("i2", Io::In, side(Side::Left, 3)),
                ("i3", Io::In, side(Side::Bottom, 3)),
            ],
            &|v| if v.iter().filter(|&&b| b).count() == 1 { Some(1) } else { None },
        ),
        _ => eprintln!("usage: gadget_search and|..."),
    }
}

#[derive(Clone, Copy)]
enum Side {
    Top,
    Bottom,
    Left,
    Right,
}

/// Attachment candidates along one side of the box [0,w) x [0,w).
fn side(s: Side, w: i32) -> Vec<Cand> {
    (0..w)
        .map(|i| match s {
            Side::Top => (Cell::xy(i, w), (U, if i == 0 { L } else { R })),
            Side::Bottom => (Cell::xy(i, -1), (D, if i == 0 { L } else { R })),
            Side::Left => (Cell::xy(-1, i), (L, if i == 0 { D } else { U })),
            Side::Right => (Cell::xy(w, i), (R, if i == 0 { D } else { U })),
        })
        .flat_map(|(c, (a, b))| {
            let other = Cell::xy(-b.x(), -b.y());
            [(c, (a, b)), (c, (a, other))]
        })
        .collect()
}

fn box3_extra() -> Vec<Cell> {
    vec![Cell::xy(2, 0), Cell::xy(2, 1), Cell::xy(2, 2), Cell::xy(0, 2), Cell::xy(1, 2)]
}

fn box3_extra_all() -> Vec<Cell> {
    let mut v = vec![Cell::xy(1, 0), Cell::xy(0, 1), Cell::xy(1, 1)];
    v.extend(box3_extra());
    v
}
