//! Gadget catalog and the instance compilers.
//!
//! Three compilers turn an instance into a region: Boolean circuits into the
//! square lattice for right trominoes and square tetrominoes (one tiling per
//! satisfying assignment), cubic planar 1-in-3 formulas into the square
//! lattice for right trominoes alone, and monotone circuits with paired
//! inputs into the cubic lattice for dominoes and straight trominoes.
//! [`lift_4d`] embeds a cubic region in four dimensions without changing its
//! tiling count.

pub mod catalog;
pub mod gadget;
pub mod layout;
pub mod port;
pub mod route;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::formula::{embed_planar, occurrence_counts, Circuit, Formula1in3, GateOp, MonotonePairing};
use crate::lattice::{parity, Cell, LatticeError, ParityColor, Region};

use catalog::gadget;
use gadget::{Family, GadgetGeometry};
use layout::{layout_2d, layout_3d, Layout, LayoutParams, Netlist};
use port::Io;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompileError {
    #[error("formula is not cubic")]
    NotCubic,
    #[error("incidence graph is not planar")]
    NotPlanar,
    #[error("circuit contains a NOT gate")]
    NotMonotone,
    #[error("expected a {expected}D region, found {found}D")]
    Dimension { expected: usize, found: usize },
    #[error("placement and routing failed at every scale")]
    Layout,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

pub type Result<T, E = CompileError> = std::result::Result<T, E>;

/// A compiled instance.
#[derive(Clone, Debug)]
pub struct PlacedInstance {
    pub family: Family,
    pub region: Region,
    /// Location of the gadget standing for each variable.
    pub input_map: BTreeMap<String, Cell>,
    /// First cell of the terminated output wire, when there is one.
    pub output_port: Option<Cell>,
    /// One line per placed gadget, wire or extra block.
    pub provenance: Vec<String>,
}

impl PlacedInstance {
    pub fn provenance_text(&self) -> String {
        let mut s = String::new();
        for line in &self.provenance {
            let _ = writeln!(s, "{line}");
        }
        s
    }
}

fn io_name(io: Io) -> &'static str {
    match io {
        Io::In => "in",
        Io::Out => "out",
    }
}

fn provenance(net: &Netlist, lay: &Layout) -> Vec<String> {
    let mut out = Vec::new();
    for (v, g) in lay.placed.iter().enumerate() {
        let (offset, sym) = lay.transforms[v];
        let ports: Vec<String> = g
            .ports
            .iter()
            .map(|p| format!("{}:{}@{}", p.name, io_name(p.io), p.start))
            .collect();
        out.push(format!(
            "gadget {} {} offset {} sym {} ports {}",
            net.nodes[v].label,
            g.name,
            offset,
            sym,
            ports.join(" ")
        ));
    }
    for (e, cells) in net.edges.iter().zip(&lay.wires) {
        out.push(format!(
            "wire {}.{} -> {}.{} cells {}",
            net.nodes[e.from.0].label, e.from.1, net.nodes[e.to.0].label, e.to.1,
            cells.len()
        ));
    }
    for ((v, name, value), cells) in net.forced.iter().zip(&lay.extensions) {
        out.push(format!(
            "extend {}.{} value {} cells {}",
            net.nodes[*v].label,
            name,
            value,
            cells.len()
        ));
    }
    out
}

/// Nodes from which the output can be reached.
fn live_nodes(c: &Circuit) -> Vec<bool> {
    let n = c.inputs.len();
    let mut live = vec![false; c.num_nodes()];
    live[c.output] = true;
    for g in (0..c.gates.len()).rev() {
        if live[n + g] {
            for &a in &c.gates[g].args {
                live[a] = true;
            }
        }
    }
    live
}

/// Feeds every consumer from one signal through a chain of splitters and
/// returns the port the signal must enter.
fn fan_out(net: &mut Netlist, splitter: &GadgetGeometry, label: &str, consumers: &[(usize, String)]) -> (usize, String) {
    if consumers.len() == 1 {
        return consumers[0].clone();
    }
    let mut head: Option<(usize, String)> = None;
    let mut prev: Option<usize> = None;
    for (i, cons) in consumers.iter().enumerate() {
        if i + 1 == consumers.len() {
            net.connect((prev.expect("chain"), "o2"), (cons.0, &cons.1));
            break;
        }
        let s = net.add(format!("{label}#split{i}"), splitter.clone(), vec![vec!["o1", "o2"]]);
        match prev {
            None => head = Some((s, "in".to_string())),
            Some(p) => net.connect((p, "o2"), (s, "in")),
        }
        net.connect((s, "o1"), (cons.0, &cons.1));
        prev = Some(s);
    }
    head.expect("at least two consumers")
}

fn region_of(dim: usize, cells: Vec<Cell>) -> Result<Region> {
    Ok(Region::from_cells(dim, cells)?)
}

/// Compiles a Boolean circuit into a square-lattice region whose tilings by
/// right trominoes and square tetrominoes correspond one-to-one to the
/// satisfying assignments.
pub fn compile_circuit_2d(c: &Circuit) -> Result<PlacedInstance> {
    compile_circuit_2d_with(c, LayoutParams::default())
}

pub fn compile_circuit_2d_with(c: &Circuit, params: LayoutParams) -> Result<PlacedInstance> {
    let n = c.inputs.len();
    let live = live_nodes(c);
    let g = |name: &str| gadget(name).expect("catalog gadget");
    let mut net = Netlist::default();
    let mut source: Vec<Option<(usize, String)>> = vec![None; c.num_nodes()];
    let mut consumers: Vec<Vec<(usize, String)>> = vec![Vec::new(); c.num_nodes()];
    let mut bulbs = BTreeMap::new();
    for i in 0..n {
        if live[i] {
            let b = net.add(c.inputs[i].clone(), g("variable_bulb"), vec![]);
            bulbs.insert(c.inputs[i].clone(), b);
            source[i] = Some((b, "out".into()));
        }
    }
    for (k, gate) in c.gates.iter().enumerate() {
        let id = n + k;
        if !live[id] {
            continue;
        }
        let label = &gate.name;
        match gate.op {
            GateOp::And => {
                let a = net.add(label.clone(), g("and2d"), vec![vec!["a", "b"]]);
                consumers[gate.args[0]].push((a, "a".into()));
                consumers[gate.args[1]].push((a, "b".into()));
                source[id] = Some((a, "out".into()));
            }
            GateOp::Not => {
                let x = net.add(label.clone(), g("not"), vec![]);
                consumers[gate.args[0]].push((x, "in".into()));
                source[id] = Some((x, "out".into()));
            }
            GateOp::Or => {
                // a or b = not(not a and not b)
                let na = net.add(format!("{label}#na"), g("not"), vec![]);
                let nb = net.add(format!("{label}#nb"), g("not"), vec![]);
                let a = net.add(format!("{label}#and"), g("and2d"), vec![vec!["a", "b"]]);
                let no = net.add(label.clone(), g("not"), vec![]);
                consumers[gate.args[0]].push((na, "in".into()));
                consumers[gate.args[1]].push((nb, "in".into()));
                net.connect((na, "out"), (a, "a"));
                net.connect((nb, "out"), (a, "b"));
                net.connect((a, "out"), (no, "in"));
                source[id] = Some((no, "out".into()));
            }
        }
    }
    let term = net.add("output", g("terminator"), vec![]);
    consumers[c.output].push((term, "in".into()));
    let splitter = g("splitter");
    for v in 0..c.num_nodes() {
        if consumers[v].is_empty() {
            continue;
        }
        let src = source[v].clone().expect("live node has a source");
        let head = fan_out(&mut net, &splitter, c.node_name(v), &consumers[v]);
        net.connect((src.0, &src.1), (head.0, &head.1));
    }
    let lay = layout_2d(&net, params).ok_or(CompileError::Layout)?;
    let mut cells = lay.cells();
    let mut prov = provenance(&net, &lay);
    let mut input_map = BTreeMap::new();
    for (name, &b) in &bulbs {
        input_map.insert(name.clone(), lay.transforms[b].0);
    }
    // unused inputs: a free 2x3 block each, which has exactly two tilings
    let right = cells.iter().map(|c| c.x()).max().unwrap_or(0) + 3;
    let mut slot = 0;
    for i in 0..n {
        if live[i] {
            continue;
        }
        let at = Cell::xy(right + 4 * slot, 0);
        slot += 1;
        for dx in 0..2 {
            for dy in 0..3 {
                cells.push(at.add(Cell::xy(dx, dy)));
            }
        }
        input_map.insert(c.inputs[i].clone(), at);
        prov.push(format!("block {} rect2x3 offset {}", c.inputs[i], at));
    }
    Ok(PlacedInstance {
        family: Family::TrominoSquare,
        region: region_of(2, cells)?,
        input_map,
        output_port: lay.placed[term].port("in").map(|p| p.start),
        provenance: prov,
    })
}

/// Compiles a cubic planar 1-in-3 formula into a square-lattice region that
/// right trominoes tile iff the formula is satisfiable.
pub fn compile_1in3_2d(f: &Formula1in3) -> Result<PlacedInstance> {
    compile_1in3_2d_with(f, LayoutParams::default())
}

pub fn compile_1in3_2d_with(f: &Formula1in3, params: LayoutParams) -> Result<PlacedInstance> {
    let occ = occurrence_counts(f);
    if !occ.is_cubic {
        return Err(CompileError::NotCubic);
    }
    if embed_planar(f).is_none() {
        return Err(CompileError::NotPlanar);
    }
    let mut net = Netlist::default();
    let var_node = gadget("variable_node").expect("catalog gadget");
    let clause_node = gadget("clause_node").expect("catalog gadget");
    let mut node_of = BTreeMap::new();
    for &v in occ.counts.keys() {
        let id = net.add(format!("v{v}"), var_node.clone(), vec![vec!["o1", "o2", "o3"]]);
        node_of.insert(v, id);
    }
    let mut used: BTreeMap<usize, usize> = BTreeMap::new();
    for (j, clause) in f.clauses.iter().enumerate() {
        let k = net.add(format!("k{}", j + 1), clause_node.clone(), vec![vec!["i1", "i2", "i3"]]);
        for (p, &v) in clause.iter().enumerate() {
            let slot = used.entry(v).or_insert(0);
            *slot += 1;
            let out = format!("o{slot}");
            let inp = format!("i{}", p + 1);
            net.connect((node_of[&v], &out), (k, &inp));
        }
    }
    let lay = layout_2d(&net, params).ok_or(CompileError::Layout)?;
    let input_map = node_of
        .iter()
        .map(|(v, &id)| (format!("v{v}"), lay.transforms[id].0))
        .collect();
    Ok(PlacedInstance {
        family: Family::Tromino,
        region: region_of(2, lay.cells())?,
        input_map,
        output_port: None,
        provenance: provenance(&net, &lay),
    })
}

/// Compiles a monotone circuit with paired inputs into a cubic-lattice region
/// that dominoes and straight trominoes tile iff the circuit is satisfiable
/// with every pair taking opposite values.
pub fn compile_monotone_3d(mp: &MonotonePairing) -> Result<PlacedInstance> {
    compile_monotone_3d_with(mp, LayoutParams::default())
}

pub fn compile_monotone_3d_with(mp: &MonotonePairing, params: LayoutParams) -> Result<PlacedInstance> {
    let c = &mp.circuit;
    if c.gates.iter().any(|g| g.op == GateOp::Not) {
        return Err(CompileError::NotMonotone);
    }
    let n = c.inputs.len();
    let live = live_nodes(c);
    let g = |name: &str| gadget(name).expect("catalog gadget");
    let mut net = Netlist::default();
    let mut consumers: Vec<Vec<(usize, String)>> = vec![Vec::new(); c.num_nodes()];
    let mut source: Vec<Option<usize>> = vec![None; c.num_nodes()];
    for (k, gate) in c.gates.iter().enumerate() {
        if !live[n + k] {
            continue;
        }
        let name = if gate.op == GateOp::And { "gate3d" } else { "gate3d_or" };
        let id = net.add(gate.name.clone(), g(name), vec![vec!["a", "b"]]);
        consumers[gate.args[0]].push((id, "a".into()));
        consumers[gate.args[1]].push((id, "b".into()));
        source[n + k] = Some(id);
    }
    let term = net.add("output", g("terminator3d"), vec![]);
    consumers[c.output].push((term, "in".into()));
    let splitter = g("dirty_splitter");
    let mut endpoint: Vec<Option<(usize, String)>> = vec![None; n];
    for v in 0..c.num_nodes() {
        if consumers[v].is_empty() {
            continue;
        }
        let head = fan_out(&mut net, &splitter, c.node_name(v), &consumers[v]);
        match source[v] {
            Some(gate) => net.connect((gate, "out"), (head.0, &head.1)),
            None => endpoint[v] = Some(head),
        }
    }
    let mut paired = vec![false; n];
    for &(x, y) in &mp.pairs {
        paired[x] = true;
        paired[y] = true;
        match (&endpoint[x], &endpoint[y]) {
            (Some(a), Some(b)) => net.connect((a.0, &a.1), (b.0, &b.1)),
            // with the partner unused the circuit is monotone in this input,
            // so it may as well be true
            (Some(a), None) | (None, Some(a)) => net.forced.push((a.0, a.1.clone(), true)),
            (None, None) => {}
        }
    }
    for (i, e) in endpoint.iter().enumerate() {
        if let (Some(a), false) = (e, paired[i]) {
            net.forced.push((a.0, a.1.clone(), true));
        }
    }
    let lay = layout_3d(&net, params).ok_or(CompileError::Layout)?;
    let mut input_map = BTreeMap::new();
    for (i, e) in endpoint.iter().enumerate() {
        if let Some((v, p)) = e {
            input_map.insert(c.inputs[i].clone(), lay.placed[*v].port(p).expect("port").start);
        }
    }
    Ok(PlacedInstance {
        family: Family::DominoTromino3d,
        region: region_of(3, lay.cells())?,
        input_map,
        output_port: lay.placed[term].port("in").map(|p| p.start),
        provenance: provenance(&net, &lay),
    })
}

/// Fills the bounding box of a cubic region and attaches to every filler
/// site a peg one step along the fourth axis, up on even sites and down on
/// odd ones. Each peg can only be covered together with its site, so the
/// tiling count of the result (dominoes and straight trominoes) equals that
/// of the original region.
pub fn lift_4d(r: &Region) -> Result<Region> {
    if r.dim() != 3 {
        return Err(CompileError::Dimension {
            expected: 3,
            found: r.dim(),
        });
    }
    let mut out = Region::new(4)?;
    let Some((lo, hi)) = r.bounds() else {
        return Ok(out);
    };
    for x in lo.x()..=hi.x() {
        for y in lo.y()..=hi.y() {
            for z in lo.z()..=hi.z() {
                let site = Cell::xyz(x, y, z);
                let base = site.lift(4);
                out.insert(base)?;
                if !r.contains(&site) {
                    let w = match parity(site) {
                        ParityColor::Even => 1,
                        ParityColor::Odd => -1,
                    };
                    out.insert(base.with(3, w))?;
                }
            }
        }
    }
    Ok(out)
}
