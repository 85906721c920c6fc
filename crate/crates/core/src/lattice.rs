//! Integer lattice geometry: cells, regions, tile shapes and their orientations,
//! checkerboard and five-colour phase colourings, and the text formats used to
//! store regions and tilesets.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

/// Largest supported lattice dimension.
pub const MAX_DIM: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("dimension {0} is not supported (expected 2, 3 or 4)")]
    BadDimension(usize),
    #[error("mixed dimensions: expected {expected}, found {found}")]
    MixedDimensions { expected: usize, found: usize },
    #[error("duplicate cell {0}")]
    DuplicateCell(Cell),
    #[error("shape has no cells")]
    EmptyShape,
    #[error("shape is not connected")]
    Disconnected,
    #[error("unknown tile `{0}`")]
    UnknownTile(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T, E = LatticeError> = std::result::Result<T, E>;

fn check_dim(dim: usize) -> Result<()> {
    if (2..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(LatticeError::BadDimension(dim))
    }
}

/// A unit cell of the `dim`-dimensional hypercubic lattice.
///
/// Cells order lexicographically with the last coordinate most significant,
/// which is the canonical order used for iteration and serialization.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cell {
    dim: u8,
    coords: [i32; MAX_DIM],
}

impl Cell {
    pub fn new(coords: &[i32]) -> Result<Cell> {
        check_dim(coords.len())?;
        let mut c = [0; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Cell {
            dim: coords.len() as u8,
            coords: c,
        })
    }

    pub const fn xy(x: i32, y: i32) -> Cell {
        Cell {
            dim: 2,
            coords: [x, y, 0, 0],
        }
    }

    pub const fn xyz(x: i32, y: i32, z: i32) -> Cell {
        Cell {
            dim: 3,
            coords: [x, y, z, 0],
        }
    }

    pub const fn xyzw(x: i32, y: i32, z: i32, w: i32) -> Cell {
        Cell {
            dim: 4,
            coords: [x, y, z, w],
        }
    }

    /// The origin of the given dimension.
    pub fn origin(dim: usize) -> Cell {
        debug_assert!((2..=MAX_DIM).contains(&dim));
        Cell {
            dim: dim as u8,
            coords: [0; MAX_DIM],
        }
    }

    /// Unit vector along `axis`, scaled by `sign`.
    pub fn unit(dim: usize, axis: usize, sign: i32) -> Cell {
        let mut c = Cell::origin(dim);
        c.coords[axis] = sign;
        c
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coords(&self) -> &[i32] {
        &self.coords[..self.dim()]
    }

    pub fn get(&self, axis: usize) -> i32 {
        self.coords[axis]
    }

    pub fn x(&self) -> i32 {
        self.coords[0]
    }

    pub fn y(&self) -> i32 {
        self.coords[1]
    }

    pub fn z(&self) -> i32 {
        self.coords[2]
    }

    pub fn w(&self) -> i32 {
        self.coords[3]
    }

    /// Returns a copy with `axis` set to `value`.
    pub fn with(mut self, axis: usize, value: i32) -> Cell {
        self.coords[axis] = value;
        self
    }

    /// Embeds the cell into a higher dimension by appending zero coordinates.
    pub fn lift(self, dim: usize) -> Cell {
        debug_assert!(dim >= self.dim());
        Cell {
            dim: dim as u8,
            coords: self.coords,
        }
    }

    pub fn add(self, other: Cell) -> Cell {
        debug_assert_eq!(self.dim, other.dim);
        let mut c = self;
        for i in 0..MAX_DIM {
            c.coords[i] += other.coords[i];
        }
        c
    }

    pub fn sub(self, other: Cell) -> Cell {
        debug_assert_eq!(self.dim, other.dim);
        let mut c = self;
        for i in 0..MAX_DIM {
            c.coords[i] -= other.coords[i];
        }
        c
    }

    pub fn neg(self) -> Cell {
        let mut c = self;
        for v in c.coords.iter_mut() {
            *v = -*v;
        }
        c
    }

    pub fn scale(self, k: i32) -> Cell {
        let mut c = self;
        for v in c.coords.iter_mut() {
            *v *= k;
        }
        c
    }

    /// The 2·dim lattice neighbours at unit distance.
    pub fn neighbors(self) -> impl Iterator<Item = Cell> {
        let dim = self.dim();
        (0..dim).flat_map(move |axis| {
            [-1, 1]
                .into_iter()
                .map(move |s| self.add(Cell::unit(dim, axis, s)))
        })
    }

    pub fn is_adjacent(self, other: Cell) -> bool {
        self.dim == other.dim && self.manhattan(other) == 1
    }

    pub fn manhattan(self, other: Cell) -> i32 {
        self.coords
            .iter()
            .zip(other.coords.iter())
            .map(|(a, b)| (a - b).abs())
            .sum()
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim.cmp(&other.dim).then_with(|| {
            for i in (0..MAX_DIM).rev() {
                match self.coords[i].cmp(&other.coords[i]) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ParityColor {
    Even,
    Odd,
}

impl ParityColor {
    pub fn is_odd(self) -> bool {
        self == ParityColor::Odd
    }
}

/// Checkerboard colour: sum of coordinates mod 2.
pub fn parity(cell: Cell) -> ParityColor {
    if cell.coords().iter().sum::<i32>().rem_euclid(2) == 0 {
        ParityColor::Even
    } else {
        ParityColor::Odd
    }
}

/// One of the five knight-periodic colours of the square lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhaseColor(pub u8);

/// `(x + 2y) mod 5`. Constant along the knight vectors (1,2) and (2,-1).
pub fn phase_color(cell: Cell) -> Result<PhaseColor> {
    if cell.dim() != 2 {
        return Err(LatticeError::MixedDimensions {
            expected: 2,
            found: cell.dim(),
        });
    }
    Ok(PhaseColor((cell.x() + 2 * cell.y()).rem_euclid(5) as u8))
}

/// Colour change per step along a 2D displacement.
pub fn phase_delta(step: (i32, i32)) -> u8 {
    (step.0 + 2 * step.1).rem_euclid(5) as u8
}

/// A finite set of lattice cells of a single dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Region {
    dim: usize,
    cells: BTreeSet<Cell>,
}

impl Region {
    pub fn new(dim: usize) -> Result<Region> {
        check_dim(dim)?;
        Ok(Region {
            dim,
            cells: BTreeSet::new(),
        })
    }

    /// Builds a region; duplicate cells are an error.
    pub fn from_cells<I: IntoIterator<Item = Cell>>(dim: usize, cells: I) -> Result<Region> {
        let mut r = Region::new(dim)?;
        for c in cells {
            if !r.insert(c)? {
                return Err(LatticeError::DuplicateCell(c));
            }
        }
        Ok(r)
    }

    /// Builds a region, silently merging duplicates.
    pub fn from_cells_lossy<I: IntoIterator<Item = Cell>>(dim: usize, cells: I) -> Result<Region> {
        let mut r = Region::new(dim)?;
        for c in cells {
            r.insert(c)?;
        }
        Ok(r)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Inserts a cell, returning whether it was new.
    pub fn insert(&mut self, cell: Cell) -> Result<bool> {
        if cell.dim() != self.dim {
            return Err(LatticeError::MixedDimensions {
                expected: self.dim,
                found: cell.dim(),
            });
        }
        Ok(self.cells.insert(cell))
    }

    pub fn remove(&mut self, cell: &Cell) -> bool {
        self.cells.remove(cell)
    }

    pub fn contains(&self, cell: &Cell) -> bool {
        self.cells.contains(cell)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Cells in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = &Cell> + '_ {
        self.cells.iter()
    }

    pub fn cells(&self) -> &BTreeSet<Cell> {
        &self.cells
    }

    pub fn translate(&self, by: Cell) -> Region {
        Region {
            dim: self.dim,
            cells: self.cells.iter().map(|c| c.add(by)).collect(),
        }
    }

    /// Applies `f` to every cell; the result must stay in the same dimension.
    pub fn map<F: Fn(Cell) -> Cell>(&self, f: F) -> Region {
        Region {
            dim: self.dim,
            cells: self.cells.iter().map(|&c| f(c)).collect(),
        }
    }

    /// Minimum and maximum corner of the bounding box, if non-empty.
    pub fn bounds(&self) -> Option<(Cell, Cell)> {
        let mut it = self.cells.iter();
        let first = *it.next()?;
        let (mut lo, mut hi) = (first, first);
        for c in it {
            for a in 0..self.dim {
                lo.coords[a] = lo.coords[a].min(c.coords[a]);
                hi.coords[a] = hi.coords[a].max(c.coords[a]);
            }
        }
        Some((lo, hi))
    }

    pub fn is_connected(&self) -> bool {
        is_connected(self.cells.iter().copied())
    }

    /// Merges `other` into `self`; overlapping cells are reported as duplicates.
    pub fn union_disjoint(&mut self, other: &Region) -> Result<()> {
        for &c in other.iter() {
            if !self.insert(c)? {
                return Err(LatticeError::DuplicateCell(c));
            }
        }
        Ok(())
    }
}

/// True iff the cells form a single component under unit-step adjacency.
/// The empty set is connected.
pub fn is_connected<I: IntoIterator<Item = Cell>>(cells: I) -> bool {
    let set: HashSet<Cell> = cells.into_iter().collect();
    let Some(&start) = set.iter().next() else {
        return true;
    };
    let mut seen = HashSet::with_capacity(set.len());
    seen.insert(start);
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        for n in c.neighbors() {
            if set.contains(&n) && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    seen.len() == set.len()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symmetry {
    Fixed,
    Rotations,
    RotationsReflections,
}

impl Symmetry {
    pub fn as_str(self) -> &'static str {
        match self {
            Symmetry::Fixed => "fixed",
            Symmetry::Rotations => "rotations",
            Symmetry::RotationsReflections => "rotations+reflections",
        }
    }

    pub fn parse(s: &str) -> Option<Symmetry> {
        match s {
            "fixed" => Some(Symmetry::Fixed),
            "rotations" => Some(Symmetry::Rotations),
            "rotations+reflections" => Some(Symmetry::RotationsReflections),
            _ => None,
        }
    }
}

/// Translates a cell set so that its minimum coordinate along every axis is 0.
/// The result is sorted canonically.
pub fn normalize_shape(cells: &[Cell]) -> Result<Vec<Cell>> {
    let first = cells.first().ok_or(LatticeError::EmptyShape)?;
    let dim = first.dim();
    if let Some(bad) = cells.iter().find(|c| c.dim() != dim) {
        return Err(LatticeError::MixedDimensions {
            expected: dim,
            found: bad.dim(),
        });
    }
    if !is_connected(cells.iter().copied()) {
        return Err(LatticeError::Disconnected);
    }
    Ok(normalize_unchecked(cells))
}

fn normalize_unchecked(cells: &[Cell]) -> Vec<Cell> {
    let dim = cells[0].dim();
    let mut lo = cells[0];
    for c in cells {
        for a in 0..dim {
            lo.coords[a] = lo.coords[a].min(c.coords[a]);
        }
    }
    let mut out: Vec<Cell> = cells.iter().map(|c| c.sub(lo)).collect();
    out.sort();
    out.dedup();
    out
}

/// A named tile with a canonical cell set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileShape {
    name: String,
    cells: Vec<Cell>,
    symmetry: Symmetry,
}

impl TileShape {
    pub fn new(name: impl Into<String>, cells: &[Cell], symmetry: Symmetry) -> Result<TileShape> {
        Ok(TileShape {
            name: name.into(),
            cells: normalize_shape(cells)?,
            symmetry,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn dim(&self) -> usize {
        self.cells[0].dim()
    }

    pub fn size(&self) -> usize {
        self.cells.len()
    }

    pub fn orientations(&self) -> Vec<Vec<Cell>> {
        orientations(self)
    }
}

/// Quarter-turn in the (i, j) coordinate plane.
fn rotate_plane(c: Cell, i: usize, j: usize) -> Cell {
    let mut r = c;
    r.coords[i] = -c.coords[j];
    r.coords[j] = c.coords[i];
    r
}

fn reflect_axis0(c: Cell) -> Cell {
    let mut r = c;
    r.coords[0] = -r.coords[0];
    r
}

/// Generators of the symmetry group acting on cells of dimension `dim`.
fn generators(dim: usize, symmetry: Symmetry) -> Vec<Box<dyn Fn(Cell) -> Cell>> {
    let mut gens: Vec<Box<dyn Fn(Cell) -> Cell>> = Vec::new();
    if symmetry == Symmetry::Fixed {
        return gens;
    }
    for i in 0..dim {
        for j in i + 1..dim {
            gens.push(Box::new(move |c| rotate_plane(c, i, j)));
        }
    }
    if symmetry == Symmetry::RotationsReflections {
        gens.push(Box::new(reflect_axis0));
    }
    gens
}

/// All distinct normalized images of the shape under its symmetry group,
/// sorted canonically. The identity image is always present.
pub fn orientations(shape: &TileShape) -> Vec<Vec<Cell>> {
    let gens = generators(shape.dim(), shape.symmetry);
    let start = shape.cells.clone();
    let mut seen: BTreeSet<Vec<Cell>> = BTreeSet::new();
    seen.insert(start.clone());
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        for g in &gens {
            let img: Vec<Cell> = cur.iter().map(|&c| g(c)).collect();
            let img = normalize_unchecked(&img);
            if seen.insert(img.clone()) {
                queue.push_back(img);
            }
        }
    }
    seen.into_iter().collect()
}

/// Applies every element of the symmetry group to a region (used by tests and
/// the invariance checks); returns the distinct images without normalizing.
pub fn symmetry_images(region: &Region, symmetry: Symmetry) -> Vec<Region> {
    let gens = generators(region.dim(), symmetry);
    let mut seen: Vec<Region> = vec![region.clone()];
    let mut i = 0;
    while i < seen.len() {
        let cur = seen[i].clone();
        for g in &gens {
            let img = cur.map(|c| g(c));
            if !seen.contains(&img) {
                seen.push(img);
            }
        }
        i += 1;
    }
    seen
}

pub const BUILTIN_TILES: &[&str] = &[
    "right_tromino",
    "square_tetromino",
    "domino2",
    "domino3",
    "straight_tromino3",
    "domino4",
    "straight_tromino4",
];

/// Looks up one of the built-in tiles by name.
pub fn builtin_tile(name: &str) -> Result<TileShape> {
    let line = |dim: usize, len: i32| -> Vec<Cell> {
        (0..len)
            .map(|i| Cell::unit(dim, 0, 1).scale(i))
            .collect()
    };
    let (cells, sym) = match name {
        "right_tromino" => (
            vec![Cell::xy(0, 0), Cell::xy(1, 0), Cell::xy(0, 1)],
            Symmetry::Rotations,
        ),
        "square_tetromino" => (
            vec![Cell::xy(0, 0), Cell::xy(1, 0), Cell::xy(0, 1), Cell::xy(1, 1)],
            Symmetry::Rotations,
        ),
        "domino2" => (line(2, 2), Symmetry::Rotations),
        "domino3" => (line(3, 2), Symmetry::Rotations),
        "straight_tromino3" => (line(3, 3), Symmetry::Rotations),
        "domino4" => (line(4, 2), Symmetry::Rotations),
        "straight_tromino4" => (line(4, 3), Symmetry::Rotations),
        _ => return Err(LatticeError::UnknownTile(name.to_string())),
    };
    TileShape::new(name, &cells, sym)
}

/// Resolves a comma-separated list of built-in names.
pub fn builtin_tileset(names: &str) -> Result<Vec<TileShape>> {
    names
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(builtin_tile)
        .collect()
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
    .trim()
}

fn parse_cell(line: &str, lineno: usize) -> Result<Cell> {
    let coords: Vec<i32> = line
        .split_whitespace()
        .map(|t| {
            t.parse::<i32>().map_err(|_| LatticeError::Parse {
                line: lineno,
                msg: format!("bad integer `{t}`"),
            })
        })
        .collect::<Result<_>>()?;
    Cell::new(&coords).map_err(|e| LatticeError::Parse {
        line: lineno,
        msg: e.to_string(),
    })
}

/// Parses the region text format.
pub fn parse_region(text: &str) -> Result<Region> {
    let mut region: Option<Region> = None;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        match region.as_mut() {
            None => {
                let mut toks = line.split_whitespace();
                let (Some("dim"), Some(d), None) = (toks.next(), toks.next(), toks.next()) else {
                    return Err(LatticeError::Parse {
                        line: lineno,
                        msg: "expected `dim D` header".into(),
                    });
                };
                let d: usize = d.parse().map_err(|_| LatticeError::Parse {
                    line: lineno,
                    msg: format!("bad dimension `{d}`"),
                })?;
                region = Some(Region::new(d).map_err(|e| LatticeError::Parse {
                    line: lineno,
                    msg: e.to_string(),
                })?);
            }
            Some(r) => {
                let c = parse_cell(line, lineno)?;
                let fresh = r.insert(c).map_err(|e| LatticeError::Parse {
                    line: lineno,
                    msg: e.to_string(),
                })?;
                if !fresh {
                    return Err(LatticeError::DuplicateCell(c));
                }
            }
        }
    }
    region.ok_or(LatticeError::Parse {
        line: 0,
        msg: "missing `dim D` header".into(),
    })
}

fn write_cell(out: &mut String, c: &Cell) {
    for (i, v) in c.coords().iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&v.to_string());
    }
    out.push('\n');
}

/// Emits the region text format with cells in canonical order.
pub fn emit_region(region: &Region) -> String {
    let mut out = format!("dim {}\n", region.dim());
    for c in region.iter() {
        write_cell(&mut out, c);
    }
    out
}

/// Parses a tileset file. A `tile NAME` block without cell lines refers to a
/// built-in tile.
pub fn parse_tileset(text: &str) -> Result<Vec<TileShape>> {
    struct Block {
        name: String,
        line: usize,
        symmetry: Option<Symmetry>,
        cells: Vec<Cell>,
    }
    fn finish(b: Block) -> Result<TileShape> {
        if b.cells.is_empty() {
            let mut t = builtin_tile(&b.name).map_err(|_| LatticeError::Parse {
                line: b.line,
                msg: format!("tile `{}` has no cells and is not built in", b.name),
            })?;
            if let Some(s) = b.symmetry {
                t.symmetry = s;
            }
            return Ok(t);
        }
        let dim = b.cells[0].dim();
        if b.cells.iter().any(|c| c.dim() != dim) {
            return Err(LatticeError::Parse {
                line: b.line,
                msg: format!("tile `{}` mixes dimensions", b.name),
            });
        }
        let mut seen = HashSet::new();
        if let Some(dup) = b.cells.iter().find(|c| !seen.insert(**c)) {
            return Err(LatticeError::DuplicateCell(*dup));
        }
        TileShape::new(b.name, &b.cells, b.symmetry.unwrap_or(Symmetry::Rotations))
    }

    let mut tiles = Vec::new();
    let mut cur: Option<Block> = None;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("tile") => {
                let name = toks.next().ok_or(LatticeError::Parse {
                    line: lineno,
                    msg: "missing tile name".into(),
                })?;
                if let Some(b) = cur.take() {
                    tiles.push(finish(b)?);
                }
                cur = Some(Block {
                    name: name.to_string(),
                    line: lineno,
                    symmetry: None,
                    cells: Vec::new(),
                });
            }
            Some("symmetry") => {
                let b = cur.as_mut().ok_or(LatticeError::Parse {
                    line: lineno,
                    msg: "`symmetry` outside a tile block".into(),
                })?;
                let s = toks.next().and_then(Symmetry::parse).ok_or(LatticeError::Parse {
                    line: lineno,
                    msg: "expected fixed|rotations|rotations+reflections".into(),
                })?;
                b.symmetry = Some(s);
            }
            Some(_) => {
                let b = cur.as_mut().ok_or(LatticeError::Parse {
                    line: lineno,
                    msg: "cell outside a tile block".into(),
                })?;
                b.cells.push(parse_cell(line, lineno)?);
            }
            None => unreachable!(),
        }
    }
    if let Some(b) = cur.take() {
        tiles.push(finish(b)?);
    }
    Ok(tiles)
}

pub fn emit_tileset(tiles: &[TileShape]) -> String {
    let mut out = String::new();
    for t in tiles {
        out.push_str(&format!("tile {}\nsymmetry {}\n", t.name, t.symmetry.as_str()));
        for c in &t.cells {
            write_cell(&mut out, c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cells2(pts: &[(i32, i32)]) -> Vec<Cell> {
        pts.iter().map(|&(x, y)| Cell::xy(x, y)).collect()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(
            normalize_shape(&cells2(&[(5, 5), (6, 5)])).unwrap(),
            cells2(&[(0, 0), (1, 0)])
        );
        assert_eq!(normalize_shape(&cells2(&[(0, 0)])).unwrap(), cells2(&[(0, 0)]));
        let mut want = cells2(&[(0, 0), (0, 1), (1, 0)]);
        want.sort();
        assert_eq!(
            normalize_shape(&cells2(&[(1, 1), (1, 2), (2, 1)])).unwrap(),
            want
        );
    }

    #[test]
    fn normalize_errors() {
        assert_eq!(normalize_shape(&[]), Err(LatticeError::EmptyShape));
        assert_eq!(
            normalize_shape(&cells2(&[(0, 0), (2, 0)])),
            Err(LatticeError::Disconnected)
        );
        assert!(matches!(
            normalize_shape(&[Cell::xy(0, 0), Cell::xyz(1, 0, 0)]),
            Err(LatticeError::MixedDimensions { .. })
        ));
    }

    #[test]
    fn orientation_counts() {
        assert_eq!(builtin_tile("right_tromino").unwrap().orientations().len(), 4);
        let mut sq = builtin_tile("square_tetromino").unwrap();
        sq.symmetry = Symmetry::RotationsReflections;
        assert_eq!(sq.orientations().len(), 1);
        assert_eq!(builtin_tile("straight_tromino3").unwrap().orientations().len(), 3);
        assert_eq!(builtin_tile("domino4").unwrap().orientations().len(), 4);
        assert_eq!(builtin_tile("domino2").unwrap().orientations().len(), 2);
        // the S tetromino is chiral: 2 rotations, 4 with reflections
        let s = cells2(&[(0, 0), (1, 0), (1, 1), (2, 1)]);
        assert_eq!(TileShape::new("s", &s, Symmetry::Rotations).unwrap().orientations().len(), 2);
        assert_eq!(
            TileShape::new("s", &s, Symmetry::RotationsReflections)
                .unwrap()
                .orientations()
                .len(),
            4
        );
        assert_eq!(TileShape::new("s", &s, Symmetry::Fixed).unwrap().orientations().len(), 1);
    }

    #[test]
    fn parity_examples() {
        assert_eq!(parity(Cell::xyz(0, 0, 0)), ParityColor::Even);
        assert_eq!(parity(Cell::xyz(1, 0, 0)), ParityColor::Odd);
        assert_eq!(parity(Cell::xyz(2, 3, 5)), ParityColor::Even);
        assert_eq!(parity(Cell::xy(-1, 0)), ParityColor::Odd);
    }

    #[test]
    fn phase_examples() {
        assert_eq!(phase_color(Cell::xy(0, 0)).unwrap(), PhaseColor(0));
        assert_eq!(phase_color(Cell::xy(1, 2)).unwrap(), PhaseColor(0));
        assert_eq!(phase_color(Cell::xy(2, 1)).unwrap(), PhaseColor(4));
        assert!(phase_color(Cell::xyz(0, 0, 0)).is_err());
    }

    #[test]
    fn connectivity_examples() {
        assert!(is_connected(cells2(&[(0, 0), (1, 0)])));
        assert!(!is_connected(cells2(&[(0, 0), (2, 0)])));
        assert!(is_connected(Vec::<Cell>::new()));
    }

    #[test]
    fn canonical_order_is_last_coordinate_major() {
        let r = Region::from_cells(2, cells2(&[(1, 0), (0, 1), (0, 0)])).unwrap();
        let v: Vec<Cell> = r.iter().copied().collect();
        assert_eq!(v, cells2(&[(0, 0), (1, 0), (0, 1)]));
    }

    #[test]
    fn region_file_round_trip_and_errors() {
        let text = "# demo\ndim 3\n0 0 0\n1 0 0 # trailing\n\n0 0 1\n";
        let r = parse_region(text).unwrap();
        assert_eq!(r.len(), 3);
        let emitted = emit_region(&r);
        assert_eq!(emitted, "dim 3\n0 0 0\n1 0 0\n0 0 1\n");
        assert_eq!(emit_region(&parse_region(&emitted).unwrap()), emitted);
        assert!(matches!(
            parse_region("dim 2\n0 0\n0 0\n"),
            Err(LatticeError::DuplicateCell(_))
        ));
        assert!(parse_region("0 0\n").is_err());
        assert!(parse_region("dim 5\n").is_err());
        assert!(parse_region("dim 2\n0 0 0\n").is_err());
    }

    #[test]
    fn tileset_file() {
        let text = "tile right_tromino\ntile bar\nsymmetry fixed\n0 0\n1 0\n2 0\n";
        let t = parse_tileset(text).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].name(), "right_tromino");
        assert_eq!(t[1].symmetry(), Symmetry::Fixed);
        let again = parse_tileset(&emit_tileset(&t)).unwrap();
        assert_eq!(again, t);
        assert!(parse_tileset("tile nope\n").is_err());
        assert!(parse_tileset("0 0\n").is_err());
    }
}
