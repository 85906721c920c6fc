//! The fixed gadget catalog.
//!
//! Square-lattice gadgets use knight wires with stubs of four cells; cubic
//! gadgets use zig-zag wires. Every geometry here was found by exhaustive
//! search over small cores and is re-checked against its truth table by the
//! harness.

use std::collections::HashSet;

use thiserror::Error;

use crate::lattice::Cell;

use super::gadget::{assemble, table_from, Family, GadgetGeometry, TruthRow};
use super::port::{Io, Port};
use super::route::{route_wire, RouteLimits};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown gadget `{0}`")]
pub struct UnknownGadget(pub String);

pub const NAMES: &[&str] = &[
    "wire",
    "turn",
    "phase_zigzag",
    "and2d",
    "not",
    "splitter",
    "variable_bulb",
    "terminator",
    "variable_node",
    "clause_node",
    "wire3d",
    "gate3d",
    "gate3d_or",
    "pairing_wire",
    "dirty_splitter",
    "terminator3d",
];

const U: Cell = Cell::xy(0, 1);
const D: Cell = Cell::xy(0, -1);
const L: Cell = Cell::xy(-1, 0);
const R: Cell = Cell::xy(1, 0);
const X: Cell = Cell::xyz(1, 0, 0);
const Y: Cell = Cell::xyz(0, 1, 0);
const Z: Cell = Cell::xyz(0, 0, 1);

fn port(family: Family, name: &str, io: Io, start: Cell, moves: &[Cell]) -> Port {
    Port {
        name: name.into(),
        io,
        convention: family.convention(),
        start,
        moves: moves.to_vec(),
        stub_len: 4,
    }
}

fn build(
    name: &str,
    family: Family,
    core: &[Cell],
    ports: Vec<Port>,
    truth_table: Vec<TruthRow>,
) -> GadgetGeometry {
    GadgetGeometry {
        name: name.into(),
        family,
        region: assemble(family.dim(), core, &ports),
        ports,
        truth_table,
    }
}

fn walk(start: Cell, moves: &[Cell]) -> Vec<Cell> {
    let mut cells = vec![start];
    for &m in moves {
        let next = cells[cells.len() - 1].add(m);
        cells.push(next);
    }
    cells
}

/// A bare wire as a gadget: the first four cells form the stub of a port
/// facing backwards, the last four the stub of a port facing forwards.
fn path_gadget(name: &str, family: Family, cells: &[Cell], ios: (Io, Io)) -> GadgetGeometry {
    let period = family.convention().period();
    let n = cells.len();
    let back: Vec<Cell> = (0..period).map(|i| cells[2 - i].sub(cells[3 - i])).collect();
    let fwd: Vec<Cell> = (0..period)
        .map(|i| cells[n - 3 + i].sub(cells[n - 4 + i]))
        .collect();
    let ports = vec![
        port(family, "a", ios.0, cells[3], &back),
        port(family, "b", ios.1, cells[n - 4], &fwd),
    ];
    let pred: fn(&[bool]) -> bool = if ios.0 == ios.1 {
        |v| v[0] != v[1]
    } else {
        |v| v[0] == v[1]
    };
    build(name, family, cells, ports, table_from(2, 1, pred))
}

fn knight_run(periods: usize, cycle: [Cell; 3]) -> Vec<Cell> {
    (0..periods).flat_map(|_| cycle).collect()
}

fn wire() -> GadgetGeometry {
    let cells = walk(Cell::xy(0, 0), &knight_run(3, [D, R, D]));
    path_gadget("wire", Family::TrominoSquare, &cells, (Io::In, Io::Out))
}

fn turn() -> GadgetGeometry {
    let family = Family::TrominoSquare;
    let from = port(family, "a", Io::Out, Cell::xy(0, 0), &[D, R, D]);
    let to = port(family, "b", Io::In, Cell::xy(12, -6), &[L, D, L]);
    let blocked: HashSet<Cell> = from.stub().into_iter().chain(to.stub()).collect();
    let middle = route_wire(&from, &to, &blocked, RouteLimits::default()).expect("turn route");
    let mut cells = from.stub();
    cells.extend(middle);
    cells.extend(to.stub().into_iter().rev());
    path_gadget("turn", family, &cells, (Io::In, Io::Out))
}

fn phase_zigzag() -> GadgetGeometry {
    let mut moves = knight_run(2, [D, R, D]);
    moves.extend([R, D, R, D, R, D]);
    moves.extend(knight_run(2, [D, R, D]));
    let cells = walk(Cell::xy(0, 0), &moves);
    path_gadget("phase_zigzag", Family::TrominoSquare, &cells, (Io::In, Io::Out))
}

fn square() -> Vec<Cell> {
    vec![Cell::xy(0, 0), Cell::xy(1, 0), Cell::xy(0, 1), Cell::xy(1, 1)]
}

fn and2d() -> GadgetGeometry {
    let f = Family::TrominoSquare;
    build(
        "and2d",
        f,
        &square(),
        vec![
            port(f, "a", Io::In, Cell::xy(-1, 1), &[U, L, L]),
            port(f, "b", Io::In, Cell::xy(2, 1), &[U, R, R]),
            port(f, "out", Io::Out, Cell::xy(0, -1), &[D, L, D]),
        ],
        table_from(3, 1, |v| v[2] == (v[0] && v[1])),
    )
}

fn not() -> GadgetGeometry {
    let f = Family::TrominoSquare;
    let mut core = square();
    core.push(Cell::xy(0, 2));
    build(
        "not",
        f,
        &core,
        vec![
            port(f, "in", Io::In, Cell::xy(0, 3), &[L, U, U]),
            port(f, "out", Io::Out, Cell::xy(0, -1), &[D, L, D]),
        ],
        table_from(2, 1, |v| v[1] != v[0]),
    )
}

fn splitter() -> GadgetGeometry {
    let f = Family::TrominoSquare;
    let mut core = square();
    core.extend([Cell::xy(2, 2), Cell::xy(1, 2)]);
    build(
        "splitter",
        f,
        &core,
        vec![
            port(f, "in", Io::In, Cell::xy(1, 3), &[R, U, U]),
            port(f, "o1", Io::Out, Cell::xy(-1, 1), &[U, U, L]),
            port(f, "o2", Io::Out, Cell::xy(1, -1), &[R, D, D]),
        ],
        table_from(3, 1, |v| v[1] == v[0] && v[2] == v[0]),
    )
}

fn variable_bulb() -> GadgetGeometry {
    let f = Family::TrominoSquare;
    build(
        "variable_bulb",
        f,
        &[Cell::xy(0, 0), Cell::xy(1, 0)],
        vec![port(f, "out", Io::Out, Cell::xy(0, -1), &[R, R, D])],
        table_from(1, 1, |_| true),
    )
}

fn terminator() -> GadgetGeometry {
    // the first stub cell is a dead end, which fixes the phase to zero
    let f = Family::TrominoSquare;
    build(
        "terminator",
        f,
        &[],
        vec![port(f, "in", Io::In, Cell::xy(0, 0), &[D, R, D])],
        table_from(1, 1, |v| v[0]),
    )
}

fn variable_node() -> GadgetGeometry {
    let f = Family::Tromino;
    build(
        "variable_node",
        f,
        &square(),
        vec![
            port(f, "o1", Io::Out, Cell::xy(0, 3), &[L, U, U]),
            port(f, "o2", Io::Out, Cell::xy(-1, 2), &[D, D, L]),
            port(f, "o3", Io::Out, Cell::xy(1, -1), &[R, D, D]),
        ],
        table_from(3, 1, |v| v[1] == v[0] && v[2] == v[0]),
    )
}

fn clause_node() -> GadgetGeometry {
    let f = Family::Tromino;
    let mut core = square();
    core.extend([Cell::xy(2, 1), Cell::xy(2, 2)]);
    build(
        "clause_node",
        f,
        &core,
        vec![
            port(f, "i1", Io::In, Cell::xy(1, 3), &[R, U, U]),
            port(f, "i2", Io::In, Cell::xy(-1, 0), &[L, D, L]),
            port(f, "i3", Io::In, Cell::xy(0, -1), &[L, D, D]),
        ],
        table_from(3, 1, |v| v.iter().filter(|&&b| b).count() == 1),
    )
}

fn zigzag(n: usize) -> Vec<Cell> {
    let moves: Vec<Cell> = (0..n - 1).map(|i| if i % 2 == 0 { X } else { Y }).collect();
    walk(Cell::xyz(0, 0, 0), &moves)
}

fn wire3d() -> GadgetGeometry {
    path_gadget("wire3d", Family::DominoTromino3d, &zigzag(10), (Io::In, Io::Out))
}

fn pairing_wire() -> GadgetGeometry {
    path_gadget("pairing_wire", Family::DominoTromino3d, &zigzag(10), (Io::Out, Io::Out))
}

/// Crossbar with both inputs above its arms and the output below the centre.
/// With the centre on an even cell it computes AND.
fn crossbar(name: &str, table: Vec<TruthRow>, flip: bool, shift: Cell) -> GadgetGeometry {
    let f = Family::DominoTromino3d;
    let io = |io: Io| if flip { io.flip() } else { io };
    let core = [
        Cell::xyz(-1, 0, 0),
        Cell::xyz(0, 0, 0),
        Cell::xyz(1, 0, 0),
        Cell::xyz(0, -1, 0),
    ];
    let names = if flip { ["o1", "o2", "in"] } else { ["a", "b", "out"] };
    let mut ports = vec![
        port(f, names[0], io(Io::In), Cell::xyz(-1, 1, 0), &[X.neg(), Y]),
        port(f, names[1], io(Io::In), Cell::xyz(1, 1, 0), &[X, Y]),
        port(f, names[2], io(Io::Out), Cell::xyz(0, -1, 1), &[X, Y.neg()]),
    ];
    if flip {
        ports.rotate_right(1);
    }
    build(name, f, &core, ports, table).translate(shift)
}

fn gate3d() -> GadgetGeometry {
    crossbar(
        "gate3d",
        table_from(3, 1, |v| v[2] == (v[0] && v[1])),
        false,
        Cell::xyz(0, 0, 0),
    )
}

fn gate3d_or() -> GadgetGeometry {
    crossbar(
        "gate3d_or",
        table_from(3, 1, |v| v[2] == (v[0] || v[1])),
        false,
        Z,
    )
}

fn dirty_splitter() -> GadgetGeometry {
    // the AND crossbar read backwards: a false input forces both outputs
    // false, a true input lets any non-empty subset of outputs be true
    crossbar(
        "dirty_splitter",
        table_from(3, 1, |v| v[0] == (v[1] || v[2])),
        true,
        Cell::xyz(0, 0, 0),
    )
}

fn terminator3d() -> GadgetGeometry {
    // a dead end on an odd cell
    let f = Family::DominoTromino3d;
    build(
        "terminator3d",
        f,
        &[],
        vec![port(f, "in", Io::In, Cell::xyz(1, 0, 0), &[X, Y])],
        table_from(1, 1, |v| v[0]),
    )
}

pub fn gadget(name: &str) -> Result<GadgetGeometry, UnknownGadget> {
    Ok(match name {
        "wire" => wire(),
        "turn" => turn(),
        "phase_zigzag" => phase_zigzag(),
        "and2d" => and2d(),
        "not" => not(),
        "splitter" => splitter(),
        "variable_bulb" => variable_bulb(),
        "terminator" => terminator(),
        "variable_node" => variable_node(),
        "clause_node" => clause_node(),
        "wire3d" => wire3d(),
        "gate3d" => gate3d(),
        "gate3d_or" => gate3d_or(),
        "pairing_wire" => pairing_wire(),
        "dirty_splitter" => dirty_splitter(),
        "terminator3d" => terminator3d(),
        other => return Err(UnknownGadget(other.to_string())),
    })
}

pub fn catalog() -> Vec<GadgetGeometry> {
    NAMES.iter().map(|n| gadget(n).expect("catalog name")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::gadget::measure;
    use crate::lattice::{parity, ParityColor};
    use crate::solver::Budget;

    fn observed(g: &GadgetGeometry) -> Vec<(Vec<bool>, u64)> {
        measure(g, Budget::nodes(1_000_000))
            .unwrap()
            .into_iter()
            .map(|(v, n)| (v, n.expect("within budget").try_into().unwrap()))
            .collect()
    }

    #[test]
    fn every_gadget_matches_its_table() {
        for g in catalog() {
            for (values, n) in observed(&g) {
                assert_eq!(n, g.expected(&values), "{} {:?}", g.name, values);
            }
        }
    }

    #[test]
    fn gate_parity_selects_function() {
        let and = gadget("gate3d").unwrap();
        let or = gadget("gate3d_or").unwrap();
        let centre = |g: &GadgetGeometry| {
            let a = g.port("a").unwrap().start;
            Cell::xyz(a.x() + 1, a.y() - 1, a.z())
        };
        assert_eq!(parity(centre(&and)), ParityColor::Even);
        assert_eq!(parity(centre(&or)), ParityColor::Odd);
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert_eq!(gadget("xor").unwrap_err(), UnknownGadget("xor".into()));
    }

    #[test]
    fn turn_changes_direction() {
        let g = gadget("turn").unwrap();
        let a = g.port("a").unwrap().direction();
        let b = g.port("b").unwrap().direction();
        // incoming direction reversed is perpendicular to the outgoing one
        assert_eq!(a.x() * b.x() + a.y() * b.y(), 0);
    }
}
