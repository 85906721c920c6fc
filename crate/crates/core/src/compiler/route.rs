//! Wire routing between two port stubs.
//!
//! A routed wire is a 1-wide induced path from the last stub cell of one port
//! to the last stub cell of the other. On the square lattice the path may run
//! straight through a cell only at wire indices in the straight class of the
//! source port, and its total length must bring the target port's straight
//! class into line; the path then has exactly the two tilings of a wire. On
//! the cubic lattice every cell must be a turn, so no straight tromino fits
//! and dominoes pair consecutive cells in exactly two ways.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use thiserror::Error;

use crate::lattice::Cell;

use super::port::{Port, TruthConvention};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RouteError {
    #[error("ports `{0}` and `{1}` use different truth conventions")]
    Convention(String, String),
    #[error("no route from `{0}` to `{1}`")]
    Unroutable(String, String),
}

/// Search limits for [`route_wire`].
#[derive(Clone, Copy, Debug)]
pub struct RouteLimits {
    /// Free space kept around the obstacles' bounding box.
    pub margin: i32,
    pub max_expansions: usize,
}

impl Default for RouteLimits {
    fn default() -> Self {
        RouteLimits {
            margin: 8,
            max_expansions: 4_000_000,
        }
    }
}

fn unit_moves(dim: usize) -> Vec<Cell> {
    let mut v = Vec::with_capacity(2 * dim);
    for axis in 0..dim {
        for s in [1, -1] {
            v.push(Cell::unit(dim, axis, s));
        }
    }
    v
}

fn last_move(p: &Port) -> Cell {
    p.moves[(p.stub_len - 2) % p.moves.len()]
}

struct Rules {
    knight: bool,
    straight: usize,
    length_class: usize,
}

impl Rules {
    /// May the wire cell at `index` be entered by `m_in` and left by `m_out`?
    fn bend_ok(&self, m_in: Cell, m_out: Cell, index: usize) -> bool {
        if m_in == m_out {
            self.knight && index % 3 == self.straight
        } else {
            m_in != m_out.neg()
        }
    }
}

/// Routes a wire from the stub of `from` to the stub of `to`, avoiding
/// `blocked` (which must contain both stubs) and every cell adjacent to it.
/// Returns the new cells in order from `from` to `to`; the stubs are not
/// repeated.
pub fn route_wire(
    from: &Port,
    to: &Port,
    blocked: &HashSet<Cell>,
    limits: RouteLimits,
) -> Result<Vec<Cell>, RouteError> {
    if from.convention != to.convention {
        return Err(RouteError::Convention(from.name.clone(), to.name.clone()));
    }
    let unroutable = || RouteError::Unroutable(from.name.clone(), to.name.clone());
    let knight = from.convention == TruthConvention::Knight2d;
    let rules = Rules {
        knight,
        straight: if knight { from.straight_class() } else { 0 },
        length_class: if knight {
            (from.straight_class() + to.straight_class() + 1) % 3
        } else {
            0
        },
    };
    let dim = from.start.dim();
    let moves = unit_moves(dim);
    let a = from.cell(from.stub_len - 1);
    let b = to.cell(to.stub_len - 1);
    let b_exit = last_move(to).neg();

    let (mut lo, mut hi) = (a.coords().to_vec(), a.coords().to_vec());
    for c in blocked.iter().chain([&b]) {
        for (k, &x) in c.coords().iter().enumerate() {
            lo[k] = lo[k].min(x);
            hi[k] = hi[k].max(x);
        }
    }
    let inside = |c: Cell| {
        c.coords()
            .iter()
            .enumerate()
            .all(|(k, &x)| x >= lo[k] - limits.margin && x <= hi[k] + limits.margin)
    };

    // arena of search nodes: (cell, move into cell, wire index, parent);
    // states also remember the move before, which decides U-turns
    let mut arena: Vec<(Cell, usize, usize, usize)> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut closed: HashSet<(Cell, usize, usize, usize)> = HashSet::new();
    let start_move = moves
        .iter()
        .position(|&m| m == last_move(from))
        .expect("unit move");
    arena.push((a, start_move, from.stub_len - 1, usize::MAX));
    heap.push(Reverse((a.manhattan(b) as usize, 0usize, 0usize)));
    let mut expansions = 0;

    while let Some(Reverse((_, g, id))) = heap.pop() {
        expansions += 1;
        if expansions > limits.max_expansions {
            break;
        }
        let (c, mi, index, parent) = arena[id];
        let before = if parent == usize::MAX { usize::MAX } else { arena[parent].1 };
        let key = if knight { (c, mi, before, index % 3) } else { (c, mi, 0, 0) };
        if !closed.insert(key) {
            continue;
        }
        let m_in = moves[mi];
        for (mj, &m) in moves.iter().enumerate() {
            if !rules.bend_ok(m_in, m, index) {
                continue;
            }
            let next = c.add(m);
            if blocked.contains(&next) || !inside(next) {
                continue;
            }
            let mut touches_goal = false;
            let mut clash = false;
            for n in next.neighbors() {
                if n == c {
                    continue;
                }
                if n == b {
                    touches_goal = true;
                } else if blocked.contains(&n) {
                    clash = true;
                    break;
                }
            }
            if clash || near_own_path(&arena, id, next, 48) {
                continue;
            }
            let ni = index + 1;
            if touches_goal {
                let into_b = b.sub(next);
                let total = ni + 1 + to.stub_len;
                if rules.bend_ok(m, into_b, ni)
                    && rules.bend_ok(into_b, b_exit, ni + 1)
                    && (!knight || total % 3 == rules.length_class)
                {
                    arena.push((next, mj, ni, id));
                    let path = unwind(&arena, arena.len() - 1);
                    if is_induced(&path, a, b) {
                        return Ok(path);
                    }
                }
                continue;
            }
            let h = next.manhattan(b) as usize;
            arena.push((next, mj, ni, id));
            heap.push(Reverse((g + 1 + h, g + 1, arena.len() - 1)));
        }
    }
    Err(unroutable())
}

fn near_own_path(arena: &[(Cell, usize, usize, usize)], id: usize, cell: Cell, depth: usize) -> bool {
    // the node `id` is the predecessor; start from its parent
    let mut k = arena[id].3;
    let mut steps = 0;
    while k != usize::MAX && steps < depth {
        let c = arena[k].0;
        if c == cell || c.is_adjacent(cell) {
            return true;
        }
        k = arena[k].3;
        steps += 1;
    }
    false
}

fn unwind(arena: &[(Cell, usize, usize, usize)], mut id: usize) -> Vec<Cell> {
    let mut out = Vec::new();
    while arena[id].3 != usize::MAX {
        out.push(arena[id].0);
        id = arena[id].3;
    }
    out.reverse();
    out
}

/// Checks that `a, path.., b` has no adjacencies besides consecutive cells.
fn is_induced(path: &[Cell], a: Cell, b: Cell) -> bool {
    let mut all = vec![a];
    all.extend_from_slice(path);
    all.push(b);
    let pos: HashMap<Cell, usize> = all.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    if pos.len() != all.len() {
        return false;
    }
    all.iter().enumerate().all(|(i, c)| {
        c.neighbors()
            .filter_map(|n| pos.get(&n))
            .all(|&j| j + 1 == i || i + 1 == j)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::port::Io;
    use crate::lattice::{builtin_tileset, Region};
    use crate::compiler::gadget::forced_region;
    use crate::solver::count_tilings;

    const U: Cell = Cell::xy(0, 1);
    const D: Cell = Cell::xy(0, -1);
    const L: Cell = Cell::xy(-1, 0);
    const R: Cell = Cell::xy(1, 0);

    fn port(name: &str, io: Io, start: Cell, moves: Vec<Cell>, conv: TruthConvention) -> Port {
        Port {
            name: name.into(),
            io,
            convention: conv,
            start,
            moves,
            stub_len: 4,
        }
    }

    /// The same wire continued behind the port's first cell.
    fn back(p: &Port, io: Io) -> Port {
        Port {
            io,
            moves: p.moves.iter().rev().map(|m| m.neg()).collect(),
            stub_len: 1,
            ..p.clone()
        }
    }

    fn wire_region(from: &Port, to: &Port, extra: &[Cell]) -> (Region, Vec<Cell>) {
        let mut blocked: HashSet<Cell> = from.stub().into_iter().collect();
        blocked.extend(to.stub());
        blocked.extend(extra.iter().copied());
        let path = route_wire(from, to, &blocked, RouteLimits::default()).unwrap();
        let dim = from.start.dim();
        let cells = from.stub().into_iter().chain(path.iter().copied()).chain(to.stub());
        (Region::from_cells(dim, cells).unwrap(), path)
    }

    /// Tiling counts of the routed wire with both ends forced, read through
    /// ports that continue the wire outward at either end.
    fn forced_counts(from: &Port, to: &Port, ios: (Io, Io), extra: &[Cell]) -> Vec<((bool, bool), u32)> {
        let (region, _) = wire_region(from, to, extra);
        let ends = [back(from, ios.0), back(to, ios.1)];
        let tiles = match from.convention {
            TruthConvention::Knight2d => builtin_tileset("right_tromino,square_tetromino").unwrap(),
            TruthConvention::Zigzag3d => builtin_tileset("domino3,straight_tromino3").unwrap(),
        };
        let mut out = Vec::new();
        for (a, b) in [(false, false), (false, true), (true, false), (true, true)] {
            let r = forced_region(&region, &ends, &[a, b], 3).unwrap();
            let n: u32 = count_tilings(&r, &tiles).unwrap().try_into().unwrap();
            out.push(((a, b), n));
        }
        out
    }

    fn assert_identity(counts: &[((bool, bool), u32)]) {
        for &((a, b), n) in counts {
            assert_eq!(n, (a == b) as u32, "{a} {b}");
        }
    }

    #[test]
    fn routed_knight_wires_carry_values() {
        let from = port("o", Io::Out, Cell::xy(0, 0), vec![D, R, D], TruthConvention::Knight2d);
        for (target, moves) in [
            (Cell::xy(6, -14), vec![U, L, U]),
            (Cell::xy(15, -3), vec![L, L, U]),
            (Cell::xy(-9, -12), vec![R, U, U]),
            (Cell::xy(12, 8), vec![D, D, L]),
            (Cell::xy(13, -9), vec![U, U, L]),
        ] {
            let to = port("i", Io::In, target, moves, TruthConvention::Knight2d);
            assert_identity(&forced_counts(&from, &to, (Io::In, Io::Out), &[]));
        }
    }

    #[test]
    fn routes_avoid_obstacles() {
        let from = port("o", Io::Out, Cell::xy(0, 0), vec![D, R, D], TruthConvention::Knight2d);
        let to = port("i", Io::In, Cell::xy(20, -2), vec![L, L, U], TruthConvention::Knight2d);
        let wall: Vec<Cell> = (-12..6).map(|y| Cell::xy(8, y)).collect();
        let (_, path) = wire_region(&from, &to, &wall);
        for c in &path {
            assert!(wall.iter().all(|w| !w.is_adjacent(*c) && w != c));
        }
        assert_identity(&forced_counts(&from, &to, (Io::In, Io::Out), &wall));
    }

    #[test]
    fn zigzag_wire_carries_value() {
        let x = Cell::xyz(1, 0, 0);
        let y = Cell::xyz(0, 1, 0);
        let z = Cell::xyz(0, 0, 1);
        let from = port("o", Io::Out, Cell::xyz(0, 0, 0), vec![x, y], TruthConvention::Zigzag3d);
        let to = port("i", Io::In, Cell::xyz(9, 4, 3), vec![x.neg(), z.neg()], TruthConvention::Zigzag3d);
        assert_identity(&forced_counts(&from, &to, (Io::In, Io::Out), &[]));
    }

    #[test]
    fn pairing_wire_reads_opposite_values() {
        let x = Cell::xyz(1, 0, 0);
        let y = Cell::xyz(0, 1, 0);
        let z = Cell::xyz(0, 0, 1);
        let p = port("p", Io::In, Cell::xyz(0, 0, 0), vec![x.neg(), y], TruthConvention::Zigzag3d);
        let q = port("q", Io::In, Cell::xyz(9, 4, 3), vec![x, z], TruthConvention::Zigzag3d);
        for ((a, b), n) in forced_counts(&p, &q, (Io::Out, Io::Out), &[]) {
            assert_eq!(n, (a != b) as u32, "{a} {b}");
        }
    }
}
