//! Exact tiling of finite regions: existence, counting and enumeration.
//!
//! The main search is exact-cover backtracking that always branches on the
//! uncovered cell with the fewest remaining placements. Counting splits the
//! uncovered cells into independent components at every branch point and
//! memoizes component counts. [`oracle_count`] is a deliberately naive second
//! implementation used to cross-check the main solver.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::lattice::{Cell, Region, TileShape};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("dimension mismatch: region is {region}D but tile `{tile}` is {tile_dim}D")]
    DimensionMismatch {
        region: usize,
        tile: String,
        tile_dim: usize,
    },
    #[error("search budget of {0} nodes exceeded")]
    BudgetExceeded(u64),
}

pub type Result<T, E = SolverError> = std::result::Result<T, E>;

/// Limits on the amount of search performed by one call.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: Option<u64>,
}

impl Budget {
    pub const UNLIMITED: Budget = Budget { max_nodes: None };

    pub fn nodes(n: u64) -> Budget {
        Budget { max_nodes: Some(n) }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::UNLIMITED
    }
}

/// One translated, oriented copy of a tile.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Placement {
    pub tile: String,
    /// Index into `orientations(tile)`.
    pub orientation: usize,
    /// Translation applied to the normalized orientation.
    pub offset: Cell,
}

impl Placement {
    /// Cells covered by this placement.
    pub fn cells(&self, tileset: &[TileShape]) -> Option<Vec<Cell>> {
        let tile = tileset.iter().find(|t| t.name() == self.tile)?;
        let orients = tile.orientations();
        let o = orients.get(self.orientation)?;
        Some(o.iter().map(|c| c.add(self.offset)).collect())
    }
}

/// A set of placements partitioning a region, sorted canonically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tiling {
    pub placements: Vec<Placement>,
}

/// Result of a bounded enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub tilings: Vec<Tiling>,
    pub truncated: bool,
}

fn check_dims(region: &Region, tileset: &[TileShape]) -> Result<()> {
    for t in tileset {
        if t.dim() != region.dim() {
            return Err(SolverError::DimensionMismatch {
                region: region.dim(),
                tile: t.name().to_string(),
                tile_dim: t.dim(),
            });
        }
    }
    Ok(())
}

/// Every placement lying inside the region, ordered by (offset, tile index,
/// orientation index).
pub fn placements(region: &Region, tileset: &[TileShape]) -> Result<Vec<Placement>> {
    Ok(raw_placements(region, tileset)?
        .into_iter()
        .map(|(p, _)| p)
        .collect())
}

fn raw_placements(region: &Region, tileset: &[TileShape]) -> Result<Vec<(Placement, Vec<Cell>)>> {
    check_dims(region, tileset)?;
    let mut keyed = Vec::new();
    for (ti, tile) in tileset.iter().enumerate() {
        for (oi, orient) in tile.orientations().into_iter().enumerate() {
            let anchor = orient[0];
            for &target in region.iter() {
                let offset = target.sub(anchor);
                let cells: Vec<Cell> = orient.iter().map(|c| c.add(offset)).collect();
                if cells.iter().all(|c| region.contains(c)) {
                    keyed.push(((offset, ti, oi), cells));
                }
            }
        }
    }
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(keyed
        .into_iter()
        .map(|((offset, ti, oi), cells)| {
            (
                Placement {
                    tile: tileset[ti].name().to_string(),
                    orientation: oi,
                    offset,
                },
                cells,
            )
        })
        .collect())
}

/// gcd of tile areas; the region area must be a multiple of it.
fn area_modulus(tileset: &[TileShape]) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    tileset.iter().map(|t| t.size()).fold(0, gcd)
}

/// Exact-cover instance compiled from a region and a tileset.
struct Problem {
    placements: Vec<Placement>,
    /// Cell indices covered by each option.
    options: Vec<Vec<u32>>,
    /// Options covering each cell.
    cover: Vec<Vec<u32>>,
    /// Lattice neighbours of each cell inside the region.
    adj: Vec<Vec<u32>>,
    /// The area test failed up front.
    infeasible: bool,
}

impl Problem {
    fn new(region: &Region, tileset: &[TileShape]) -> Result<Problem> {
        let raw = raw_placements(region, tileset)?;
        let cells: Vec<Cell> = region.iter().copied().collect();
        let index: HashMap<Cell, u32> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| (*c, i as u32))
            .collect();
        let mut cover = vec![Vec::new(); cells.len()];
        let mut options = Vec::with_capacity(raw.len());
        let mut placements = Vec::with_capacity(raw.len());
        for (oi, (p, pcells)) in raw.into_iter().enumerate() {
            let mut idx: Vec<u32> = pcells.iter().map(|c| index[c]).collect();
            idx.sort_unstable();
            for &c in &idx {
                cover[c as usize].push(oi as u32);
            }
            options.push(idx);
            placements.push(p);
        }
        let adj = cells
            .iter()
            .map(|c| c.neighbors().filter_map(|n| index.get(&n).copied()).collect())
            .collect();
        let m = area_modulus(tileset);
        let infeasible = !cells.is_empty() && (m == 0 || cells.len() % m != 0);
        Ok(Problem {
            placements,
            options,
            cover,
            adj,
            infeasible,
        })
    }

    fn num_cells(&self) -> usize {
        self.cover.len()
    }
}

/// Mutable search state with reversible cover/uncover.
struct State<'a> {
    p: &'a Problem,
    covered: Vec<bool>,
    blocked: Vec<u32>,
    avail: Vec<u32>,
    nodes: u64,
    budget: Budget,
}

impl<'a> State<'a> {
    fn new(p: &'a Problem, budget: Budget) -> State<'a> {
        State {
            p,
            covered: vec![false; p.num_cells()],
            blocked: vec![0; p.options.len()],
            avail: p.cover.iter().map(|v| v.len() as u32).collect(),
            nodes: 0,
            budget,
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        match self.budget.max_nodes {
            Some(max) if self.nodes > max => Err(SolverError::BudgetExceeded(max)),
            _ => Ok(()),
        }
    }

    fn apply(&mut self, opt: u32) {
        let p = self.p;
        for &c in &p.options[opt as usize] {
            self.covered[c as usize] = true;
            for &q in &p.cover[c as usize] {
                if self.blocked[q as usize] == 0 {
                    for &d in &p.options[q as usize] {
                        self.avail[d as usize] -= 1;
                    }
                }
                self.blocked[q as usize] += 1;
            }
        }
    }

    fn undo(&mut self, opt: u32) {
        let p = self.p;
        for &c in p.options[opt as usize].iter().rev() {
            for &q in p.cover[c as usize].iter().rev() {
                self.blocked[q as usize] -= 1;
                if self.blocked[q as usize] == 0 {
                    for &d in &p.options[q as usize] {
                        self.avail[d as usize] += 1;
                    }
                }
            }
            self.covered[c as usize] = false;
        }
    }

    /// Most constrained uncovered cell of `cells`, ties to the lowest index.
    fn select(&self, cells: &[u32]) -> Option<(u32, u32)> {
        let mut best: Option<(u32, u32)> = None;
        for &c in cells {
            if self.covered[c as usize] {
                continue;
            }
            let a = self.avail[c as usize];
            if best.is_none_or(|(_, ba)| a < ba) {
                best = Some((c, a));
                if a == 0 {
                    break;
                }
            }
        }
        best
    }

    fn live_options(&self, cell: u32) -> Vec<u32> {
        self.p.cover[cell as usize]
            .iter()
            .copied()
            .filter(|&q| self.blocked[q as usize] == 0)
            .collect()
    }

    /// Splits the uncovered members of `cells` into lattice components.
    fn components(&self, cells: &[u32], mark: &mut Vec<u32>, stamp: u32) -> Vec<Vec<u32>> {
        let mut comps = Vec::new();
        for &s in cells {
            if self.covered[s as usize] || mark[s as usize] == stamp {
                continue;
            }
            mark[s as usize] = stamp;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let c = comp[i];
                for &n in &self.p.adj[c as usize] {
                    if !self.covered[n as usize] && mark[n as usize] != stamp {
                        mark[n as usize] = stamp;
                        comp.push(n);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }
}

struct Counter<'a> {
    st: State<'a>,
    memo: HashMap<Vec<u32>, BigUint>,
    mark: Vec<u32>,
    stamp: u32,
}

impl Counter<'_> {
    /// Number of ways to cover the uncovered cells of `cells`, which must be a
    /// union of components of the uncovered set.
    fn count(&mut self, cells: &[u32]) -> Result<BigUint> {
        let mut forced: Vec<u32> = Vec::new();
        let result = loop {
            match self.st.select(cells) {
                None => break Ok(BigUint::one()),
                Some((_, 0)) => break Ok(BigUint::zero()),
                Some((c, 1)) => {
                    if let Err(e) = self.st.tick() {
                        break Err(e);
                    }
                    let opt = self.st.live_options(c)[0];
                    self.st.apply(opt);
                    forced.push(opt);
                }
                Some((c, _)) => break self.branch(cells, c),
            }
        };
        for opt in forced.into_iter().rev() {
            self.st.undo(opt);
        }
        result
    }

    fn branch(&mut self, cells: &[u32], cell: u32) -> Result<BigUint> {
        self.stamp += 1;
        let comps = self.st.components(cells, &mut self.mark, self.stamp);
        if comps.len() > 1 {
            let mut total = BigUint::one();
            // Small components first: a zero there ends the product early.
            let mut comps = comps;
            comps.sort_by_key(|c| c.len());
            for comp in comps {
                let n = self.count(&comp)?;
                if n.is_zero() {
                    return Ok(n);
                }
                total *= n;
            }
            return Ok(total);
        }
        let comp = comps.into_iter().next().unwrap_or_default();
        if let Some(v) = self.memo.get(&comp) {
            return Ok(v.clone());
        }
        let mut total = BigUint::zero();
        for opt in self.st.live_options(cell) {
            self.st.tick()?;
            self.st.apply(opt);
            let r = self.count(&comp);
            self.st.undo(opt);
            total += r?;
        }
        self.memo.insert(comp, total.clone());
        Ok(total)
    }
}

struct Finder<'a> {
    st: State<'a>,
    dead: std::collections::HashSet<Vec<u32>>,
    mark: Vec<u32>,
    stamp: u32,
}

impl Finder<'_> {
    /// Whether the uncovered members of `cells` can be covered.
    fn exists(&mut self, cells: &[u32]) -> Result<bool> {
        let mut forced: Vec<u32> = Vec::new();
        let result = loop {
            match self.st.select(cells) {
                None => break Ok(true),
                Some((_, 0)) => break Ok(false),
                Some((c, 1)) => {
                    if let Err(e) = self.st.tick() {
                        break Err(e);
                    }
                    let opt = self.st.live_options(c)[0];
                    self.st.apply(opt);
                    forced.push(opt);
                }
                Some((c, _)) => break self.branch(cells, c),
            }
        };
        for opt in forced.into_iter().rev() {
            self.st.undo(opt);
        }
        result
    }

    fn branch(&mut self, cells: &[u32], cell: u32) -> Result<bool> {
        self.stamp += 1;
        let mut comps = self.st.components(cells, &mut self.mark, self.stamp);
        if comps.len() > 1 {
            comps.sort_by_key(|c| c.len());
            for comp in comps {
                if !self.exists(&comp)? {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        let comp = comps.into_iter().next().unwrap_or_default();
        if self.dead.contains(&comp) {
            return Ok(false);
        }
        for opt in self.st.live_options(cell) {
            self.st.tick()?;
            self.st.apply(opt);
            let r = self.exists(&comp);
            self.st.undo(opt);
            if r? {
                return Ok(true);
            }
        }
        self.dead.insert(comp);
        Ok(false)
    }
}

fn all_cells(p: &Problem) -> Vec<u32> {
    (0..p.num_cells() as u32).collect()
}

/// Whether the region admits at least one tiling.
pub fn exists_tiling(region: &Region, tileset: &[TileShape]) -> Result<bool> {
    exists_tiling_with(region, tileset, Budget::UNLIMITED)
}

pub fn exists_tiling_with(region: &Region, tileset: &[TileShape], budget: Budget) -> Result<bool> {
    let p = Problem::new(region, tileset)?;
    if p.infeasible {
        return Ok(false);
    }
    let mut f = Finder {
        st: State::new(&p, budget),
        dead: Default::default(),
        mark: vec![0; p.num_cells()],
        stamp: 0,
    };
    f.exists(&all_cells(&p))
}

/// Exact number of tilings.
pub fn count_tilings(region: &Region, tileset: &[TileShape]) -> Result<BigUint> {
    count_tilings_with(region, tileset, Budget::UNLIMITED)
}

pub fn count_tilings_with(
    region: &Region,
    tileset: &[TileShape],
    budget: Budget,
) -> Result<BigUint> {
    let p = Problem::new(region, tileset)?;
    if p.infeasible {
        return Ok(BigUint::zero());
    }
    let mut c = Counter {
        st: State::new(&p, budget),
        memo: HashMap::new(),
        mark: vec![0; p.num_cells()],
        stamp: 0,
    };
    c.count(&all_cells(&p))
}

/// Up to `limit` tilings in deterministic search order. `truncated` is set when
/// more tilings exist.
pub fn enumerate_tilings(region: &Region, tileset: &[TileShape], limit: usize) -> Result<Enumeration> {
    enumerate_tilings_with(region, tileset, limit, Budget::UNLIMITED)
}

pub fn enumerate_tilings_with(
    region: &Region,
    tileset: &[TileShape],
    limit: usize,
    budget: Budget,
) -> Result<Enumeration> {
    let p = Problem::new(region, tileset)?;
    let mut out = Enumeration {
        tilings: Vec::new(),
        truncated: false,
    };
    if p.infeasible {
        return Ok(out);
    }
    let mut st = State::new(&p, budget);
    let cells = all_cells(&p);
    let mut chosen = Vec::new();
    enumerate_rec(&mut st, &cells, &mut chosen, limit, &mut out)?;
    Ok(out)
}

fn enumerate_rec(
    st: &mut State<'_>,
    cells: &[u32],
    chosen: &mut Vec<u32>,
    limit: usize,
    out: &mut Enumeration,
) -> Result<bool> {
    match st.select(cells) {
        None => {
            if out.tilings.len() == limit {
                out.truncated = true;
                return Ok(false);
            }
            let mut placements: Vec<Placement> = chosen
                .iter()
                .map(|&o| st.p.placements[o as usize].clone())
                .collect();
            placements.sort();
            out.tilings.push(Tiling { placements });
            Ok(true)
        }
        Some((_, 0)) => Ok(true),
        Some((c, _)) => {
            for opt in st.live_options(c) {
                st.tick()?;
                st.apply(opt);
                chosen.push(opt);
                let keep_going = enumerate_rec(st, cells, chosen, limit, out);
                chosen.pop();
                st.undo(opt);
                if !keep_going? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Soft cap on the region size accepted by [`oracle_count`] without complaint.
pub const ORACLE_SOFT_CAP: usize = 30;

/// Independent reference count: repeatedly take the canonically first
/// uncovered cell and try every placement whose least cell it is.
pub fn oracle_count(region: &Region, tileset: &[TileShape]) -> Result<BigUint> {
    check_dims(region, tileset)?;
    let shapes: Vec<(Vec<Cell>, Cell)> = tileset
        .iter()
        .flat_map(|t| t.orientations())
        .map(|o| {
            let least = *o.iter().min().expect("nonempty orientation");
            (o, least)
        })
        .collect();
    let mut free: BTreeSet<Cell> = region.iter().copied().collect();
    Ok(oracle_rec(&mut free, &shapes))
}

fn oracle_rec(free: &mut BTreeSet<Cell>, shapes: &[(Vec<Cell>, Cell)]) -> BigUint {
    let Some(&first) = free.iter().next() else {
        return BigUint::one();
    };
    let mut total = BigUint::zero();
    for (cells, least) in shapes {
        let shift = first.sub(*least);
        let placed: Vec<Cell> = cells.iter().map(|c| c.add(shift)).collect();
        if placed.iter().all(|c| free.contains(c)) {
            for c in &placed {
                free.remove(c);
            }
            total += oracle_rec(free, shapes);
            for c in placed {
                free.insert(c);
            }
        }
    }
    total
}

/// Independent partition check: placements are valid tiles of the tileset,
/// pairwise disjoint, and cover the region exactly.
pub fn is_valid_tiling(region: &Region, tileset: &[TileShape], tiling: &Tiling) -> bool {
    let mut seen = BTreeSet::new();
    for p in &tiling.placements {
        let Some(cells) = p.cells(tileset) else {
            return false;
        };
        for c in cells {
            if !region.contains(&c) || !seen.insert(c) {
                return false;
            }
        }
    }
    seen.len() == region.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::builtin_tileset;

    fn rect(w: i32, h: i32) -> Region {
        Region::from_cells(2, (0..h).flat_map(|y| (0..w).map(move |x| Cell::xy(x, y)))).unwrap()
    }

    fn n(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn placement_examples() {
        let sq = builtin_tileset("square_tetromino").unwrap();
        assert_eq!(placements(&rect(2, 2), &sq).unwrap().len(), 1);
        let dom = builtin_tileset("domino2").unwrap();
        assert_eq!(placements(&rect(1, 1), &dom).unwrap().len(), 0);
        let tro = builtin_tileset("right_tromino").unwrap();
        assert_eq!(placements(&rect(2, 2), &tro).unwrap().len(), 4);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let t = builtin_tileset("domino3").unwrap();
        assert!(matches!(
            count_tilings(&rect(2, 2), &t),
            Err(SolverError::DimensionMismatch { .. })
        ));
        assert!(oracle_count(&rect(2, 2), &t).is_err());
        assert!(placements(&rect(2, 2), &t).is_err());
    }

    #[test]
    fn existence_examples() {
        let tro = builtin_tileset("right_tromino").unwrap();
        assert!(exists_tiling(&rect(2, 3), &tro).unwrap());
        assert!(!exists_tiling(&rect(1, 3), &tro).unwrap());
        assert!(!exists_tiling(&rect(2, 2), &tro).unwrap());
        assert!(exists_tiling(&Region::new(2).unwrap(), &tro).unwrap());
    }

    #[test]
    fn count_examples() {
        let tro = builtin_tileset("right_tromino").unwrap();
        assert_eq!(count_tilings(&Region::new(2).unwrap(), &tro).unwrap(), n(1));
        assert_eq!(count_tilings(&rect(2, 3), &tro).unwrap(), n(2));
        let both = builtin_tileset("right_tromino,square_tetromino").unwrap();
        assert_eq!(count_tilings(&rect(2, 2), &both).unwrap(), n(1));
        assert_eq!(count_tilings(&rect(3, 3), &tro).unwrap(), n(0));
    }

    #[test]
    fn enumerate_examples() {
        let tro = builtin_tileset("right_tromino").unwrap();
        let e = enumerate_tilings(&rect(2, 3), &tro, 10).unwrap();
        assert_eq!(e.tilings.len(), 2);
        assert!(!e.truncated);
        for t in &e.tilings {
            assert!(is_valid_tiling(&rect(2, 3), &tro, t));
        }
        let dom = builtin_tileset("domino2").unwrap();
        let e = enumerate_tilings(&rect(2, 2), &dom, 1).unwrap();
        assert_eq!(e.tilings.len(), 1);
        assert!(e.truncated);
        let e = enumerate_tilings(&rect(1, 1), &dom, 10).unwrap();
        assert!(e.tilings.is_empty());
        assert!(!e.truncated);
    }

    #[test]
    fn oracle_examples() {
        let dom = builtin_tileset("domino2").unwrap();
        assert_eq!(oracle_count(&rect(4, 2), &dom).unwrap(), n(5));
        let tro = builtin_tileset("right_tromino").unwrap();
        assert_eq!(oracle_count(&rect(3, 3), &tro).unwrap(), n(0));
        assert_eq!(oracle_count(&Region::new(2).unwrap(), &tro).unwrap(), n(1));
    }

    #[test]
    fn budget_is_enforced() {
        let dom = builtin_tileset("domino2").unwrap();
        assert_eq!(
            count_tilings_with(&rect(6, 6), &dom, Budget::nodes(5)),
            Err(SolverError::BudgetExceeded(5))
        );
        assert!(enumerate_tilings_with(&rect(6, 6), &dom, 1000, Budget::nodes(5)).is_err());
    }

    #[test]
    fn components_multiply() {
        // two disjoint 2x2 squares: 2 * 2 domino tilings
        let dom = builtin_tileset("domino2").unwrap();
        let mut r = rect(2, 2);
        r.union_disjoint(&rect(2, 2).translate(Cell::xy(5, 0))).unwrap();
        assert_eq!(count_tilings(&r, &dom).unwrap(), n(4));
        assert_eq!(oracle_count(&r, &dom).unwrap(), n(4));
    }

    #[test]
    fn domino_8x8_count() {
        // 12988816 tilings of the chessboard; exercises memoized counting.
        let dom = builtin_tileset("domino2").unwrap();
        assert_eq!(count_tilings(&rect(8, 8), &dom).unwrap(), n(12_988_816));
    }
}
