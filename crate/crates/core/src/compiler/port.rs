//! Wire ports and truth conventions.
//!
//! A port is the start of a 1-wide wire leaving a gadget. Its cells are
//! generated outward from `start` by cycling through `moves`; the first
//! `stub_len` cells belong to the gadget, the rest can be appended to force a
//! value (a dead end fixes the tiling phase of the whole wire) or to meet a
//! routed wire.
//!
//! Tiling phases are described by `phase`: the residue of the outward index at
//! which tiles start (mod 3 for tromino wires, mod 2 for domino wires).

use crate::lattice::{parity, phase_color, Cell, PhaseColor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Io {
    In,
    Out,
}

impl Io {
    pub fn flip(self) -> Io {
        match self {
            Io::In => Io::Out,
            Io::Out => Io::In,
        }
    }
}

/// How a wire tiling is read as a truth value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TruthConvention {
    /// Square-lattice tromino wire: true iff the tromino holding each
    /// straight-through cell comes from upstream.
    Knight2d,
    /// Cubic-lattice domino zig-zag: true iff the downstream end of each
    /// domino lies on an odd cell.
    Zigzag3d,
}

impl TruthConvention {
    /// Tiling period of a wire of this family.
    pub fn period(self) -> usize {
        match self {
            TruthConvention::Knight2d => 3,
            TruthConvention::Zigzag3d => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Port {
    pub name: String,
    pub io: Io,
    pub convention: TruthConvention,
    /// Cell of the wire nearest the gadget body.
    pub start: Cell,
    /// Cyclic outward step sequence.
    pub moves: Vec<Cell>,
    /// Number of wire cells owned by the gadget.
    pub stub_len: usize,
}

impl Port {
    /// The `i`-th outward wire cell.
    pub fn cell(&self, i: usize) -> Cell {
        let mut c = self.start;
        for k in 0..i {
            c = c.add(self.moves[k % self.moves.len()]);
        }
        c
    }

    /// First `n` outward cells.
    pub fn path(&self, n: usize) -> Vec<Cell> {
        let mut out = Vec::with_capacity(n);
        let mut c = self.start;
        for k in 0..n {
            out.push(c);
            c = c.add(self.moves[k % self.moves.len()]);
        }
        out
    }

    pub fn stub(&self) -> Vec<Cell> {
        self.path(self.stub_len)
    }

    /// Net displacement over one period of the move cycle.
    pub fn direction(&self) -> Cell {
        self.moves
            .iter()
            .fold(Cell::origin(self.start.dim()), |a, &m| a.add(m))
    }

    /// Phase colour at the port's anchor (square lattice only).
    pub fn phase(&self) -> Option<PhaseColor> {
        phase_color(self.start).ok()
    }

    /// For knight wires: residue (mod 3) of outward indices whose cell runs
    /// straight through, i.e. whose incoming and outgoing moves agree.
    pub fn straight_class(&self) -> usize {
        let k = self.moves.len();
        (1..=k)
            .find(|&i| self.moves[(i - 1) % k] == self.moves[i % k])
            .map(|i| i % 3)
            .expect("knight move cycle has a straight step")
    }

    /// Truth value carried by the outward tiling phase, or `None` for a phase
    /// that is not a legal wire state.
    pub fn value_of_phase(&self, phase: usize) -> Option<bool> {
        match self.convention {
            TruthConvention::Knight2d => {
                let s = self.straight_class();
                let p = phase % 3;
                let (t, f) = match self.io {
                    Io::Out => ((s + 1) % 3, s),
                    Io::In => (s, (s + 1) % 3),
                };
                if p == t {
                    Some(true)
                } else if p == f {
                    Some(false)
                } else {
                    None
                }
            }
            TruthConvention::Zigzag3d => {
                let par0 = parity(self.start).is_odd() as usize;
                let p = phase % 2;
                let downstream = match self.io {
                    Io::Out => p + 1,
                    Io::In => p,
                };
                Some((par0 ^ (downstream % 2)) == 1)
            }
        }
    }

    pub fn phase_of_value(&self, value: bool) -> usize {
        let period = self.convention.period();
        (0..period)
            .find(|&p| self.value_of_phase(p) == Some(value))
            .expect("both values are representable")
    }

    /// Wire length (at least `min_len`) whose dead end forces `value`.
    pub fn forcing_length(&self, value: bool, min_len: usize) -> usize {
        let period = self.convention.period();
        let phase = self.phase_of_value(value);
        let mut n = min_len.max(self.stub_len + period);
        while n % period != phase {
            n += 1;
        }
        n
    }

    /// Outward cells of a dead-ended wire forcing `value`.
    pub fn forcing_stub(&self, value: bool, min_len: usize) -> Vec<Cell> {
        self.path(self.forcing_length(value, min_len))
    }

    /// Applies a lattice map (rotation/reflection/translation) to the port.
    pub fn transform<F: Fn(Cell) -> Cell>(&self, point: F, vector: impl Fn(Cell) -> Cell) -> Port {
        Port {
            name: self.name.clone(),
            io: self.io,
            convention: self.convention,
            start: point(self.start),
            moves: self.moves.iter().map(|&m| vector(m)).collect(),
            stub_len: self.stub_len,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn knight_port(io: Io) -> Port {
        // outward pattern down, right, down: straights at outward index 0 mod 3
        Port {
            name: "p".into(),
            io,
            convention: TruthConvention::Knight2d,
            start: Cell::xy(0, 0),
            moves: vec![Cell::xy(0, -1), Cell::xy(1, 0), Cell::xy(0, -1)],
            stub_len: 3,
        }
    }

    #[test]
    fn knight_direction_and_class() {
        let p = knight_port(Io::Out);
        assert_eq!(p.direction(), Cell::xy(1, -2));
        assert_eq!(p.straight_class(), 0);
        assert_eq!(p.path(5)[4], Cell::xy(1, -3));
    }

    #[test]
    fn knight_values_are_reversed_by_orientation() {
        let out = knight_port(Io::Out);
        let inp = knight_port(Io::In);
        for ph in 0..3 {
            match (out.value_of_phase(ph), inp.value_of_phase(ph)) {
                (Some(a), Some(b)) => assert_ne!(a, b),
                (None, None) => {}
                _ => panic!("phase legality must not depend on orientation"),
            }
        }
        // the phase whose tiles are centred on the straight cells is illegal
        assert_eq!(out.value_of_phase(2), None);
    }

    #[test]
    fn forcing_lengths_match_phase() {
        let p = knight_port(Io::In);
        for v in [false, true] {
            let n = p.forcing_length(v, 4);
            assert!(n >= 6);
            assert_eq!(p.value_of_phase(n % 3), Some(v));
        }
    }

    #[test]
    fn zigzag_values() {
        let p = Port {
            name: "z".into(),
            io: Io::Out,
            convention: TruthConvention::Zigzag3d,
            start: Cell::xyz(0, 0, 0),
            moves: vec![Cell::xyz(1, 0, 0), Cell::xyz(0, 0, 1)],
            stub_len: 2,
        };
        // phase 0: dominoes (0,1),(2,3)...; downstream ends at odd indices,
        // which are odd cells since the start is even.
        assert_eq!(p.value_of_phase(0), Some(true));
        assert_eq!(p.value_of_phase(1), Some(false));
        let mut q = p.clone();
        q.io = Io::In;
        assert_eq!(q.value_of_phase(0), Some(false));
    }
}
