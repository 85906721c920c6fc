//! Gadget geometries: a body region with typed ports and a declared truth
//! table, plus the stub-forcing machinery used to measure that table.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigUint;

use crate::lattice::{builtin_tileset, Cell, Region, TileShape};
use crate::solver::{count_tilings_with, Budget, SolverError};

use super::port::{Io, Port, TruthConvention};

/// Tile family a gadget is designed for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Right tromino and square tetromino on the square lattice.
    TrominoSquare,
    /// Right tromino alone.
    Tromino,
    /// Domino and straight tromino on the cubic lattice.
    DominoTromino3d,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::TrominoSquare => "tromino_square",
            Family::Tromino => "tromino",
            Family::DominoTromino3d => "domino_tromino3d",
        }
    }

    pub fn tileset(self) -> Vec<TileShape> {
        let names = match self {
            Family::TrominoSquare => "right_tromino,square_tetromino",
            Family::Tromino => "right_tromino",
            Family::DominoTromino3d => "domino3,straight_tromino3",
        };
        builtin_tileset(names).expect("built-in tiles")
    }

    pub fn convention(self) -> TruthConvention {
        match self {
            Family::TrominoSquare | Family::Tromino => TruthConvention::Knight2d,
            Family::DominoTromino3d => TruthConvention::Zigzag3d,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Family::DominoTromino3d => 3,
            _ => 2,
        }
    }
}

/// One allowed combination of port values and its number of tilings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthRow {
    /// Values in port order.
    pub values: Vec<bool>,
    pub tilings: u64,
}

#[derive(Clone, Debug)]
pub struct GadgetGeometry {
    pub name: String,
    pub family: Family,
    /// Body cells, including every port stub.
    pub region: Region,
    pub ports: Vec<Port>,
    /// Allowed port combinations; every other combination admits no tiling.
    pub truth_table: Vec<TruthRow>,
}

impl GadgetGeometry {
    pub fn port(&self, name: &str) -> Option<&Port> {
        self.ports.iter().find(|p| p.name == name)
    }

    pub fn port_index(&self, name: &str) -> Option<usize> {
        self.ports.iter().position(|p| p.name == name)
    }

    /// Expected tiling count for a port combination (0 when absent).
    pub fn expected(&self, values: &[bool]) -> u64 {
        self.truth_table
            .iter()
            .find(|r| r.values == values)
            .map_or(0, |r| r.tilings)
    }

    /// Applies an affine lattice map to the whole gadget.
    pub fn transform<P, V>(&self, point: P, vector: V) -> GadgetGeometry
    where
        P: Fn(Cell) -> Cell,
        V: Fn(Cell) -> Cell,
    {
        GadgetGeometry {
            name: self.name.clone(),
            family: self.family,
            region: self.region.map(&point),
            ports: self
                .ports
                .iter()
                .map(|p| p.transform(&point, &vector))
                .collect(),
            truth_table: self.truth_table.clone(),
        }
    }

    pub fn translate(&self, by: Cell) -> GadgetGeometry {
        self.transform(|c| c.add(by), |v| v)
    }
}

/// Builds the body region of a gadget from core cells and port stubs.
pub fn assemble(dim: usize, core: &[Cell], ports: &[Port]) -> Region {
    let cells = core
        .iter()
        .copied()
        .chain(ports.iter().flat_map(|p| p.stub()));
    Region::from_cells_lossy(dim, cells).expect("consistent dimension")
}

/// Extra cells appended beyond every stub so that each port is forced to the
/// given value by a dead end. Fails if an extension touches anything but its
/// own wire.
pub fn forced_region(
    body: &Region,
    ports: &[Port],
    values: &[bool],
    extra: usize,
) -> Result<Region, String> {
    let mut region = body.clone();
    let mut own: Vec<HashSet<Cell>> = Vec::new();
    for (p, &v) in ports.iter().zip(values) {
        let path = p.forcing_stub(v, p.stub_len + extra);
        own.push(path.iter().copied().collect());
        for &c in &path[p.stub_len..] {
            if !region.insert(c).map_err(|e| e.to_string())? {
                return Err(format!("port {} extension overlaps at {c}", p.name));
            }
        }
    }
    for (i, p) in ports.iter().enumerate() {
        let path = p.path(p.forcing_length(values[i], p.stub_len + extra));
        for (k, &c) in path.iter().enumerate().skip(p.stub_len) {
            for n in c.neighbors() {
                let legit = (k > 0 && n == path[k - 1]) || path.get(k + 1) == Some(&n);
                if region.contains(&n) && !legit {
                    return Err(format!("port {} extension touches {n}", p.name));
                }
            }
        }
    }
    Ok(region)
}

/// Tiling counts of the gadget for every port combination, keyed by the
/// value vector. `None` marks a combination whose search ran out of budget.
pub fn measure(
    g: &GadgetGeometry,
    budget: Budget,
) -> Result<BTreeMap<Vec<bool>, Option<BigUint>>, String> {
    let tiles = g.family.tileset();
    let k = g.ports.len();
    let mut out = BTreeMap::new();
    for mask in 0..(1u32 << k) {
        let values: Vec<bool> = (0..k).map(|i| mask >> i & 1 == 1).collect();
        let region = forced_region(&g.region, &g.ports, &values, 4)?;
        let r = match count_tilings_with(&region, &tiles, budget) {
            Ok(n) => Some(n),
            Err(SolverError::BudgetExceeded(_)) => None,
            Err(e) => return Err(e.to_string()),
        };
        out.insert(values, r);
    }
    Ok(out)
}

/// Convenience for hand-written truth tables: all combinations satisfying
/// `pred`, each with `tilings` tilings.
pub fn table_from<F: Fn(&[bool]) -> bool>(ports: usize, tilings: u64, pred: F) -> Vec<TruthRow> {
    (0..(1u32 << ports))
        .map(|mask| (0..ports).map(|i| mask >> i & 1 == 1).collect::<Vec<bool>>())
        .filter(|v| pred(v))
        .map(|values| TruthRow { values, tilings })
        .collect()
}

/// Names inputs first, then outputs; used for display only.
pub fn port_signature(g: &GadgetGeometry) -> String {
    g.ports
        .iter()
        .map(|p| {
            format!(
                "{}:{}",
                p.name,
                match p.io {
                    Io::In => "in",
                    Io::Out => "out",
                }
            )
        })
        .collect::<Vec<_>>()
        .join(",")
}
