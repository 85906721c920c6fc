//! Planar monotone 1-in-3 SAT to its cubic special case.
//!
//! Stage one splits every variable with several occurrences into one copy per
//! occurrence, linked by chains of equality verifiers. Stage two collects the
//! occurrences still missing around each face and feeds them into a sorting
//! gadget that checks how many of them are true, modulo 3.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::formula::planar::{planar_embedding, Graph, RotationSystem};
use crate::formula::{
    backtrack_with_fixed, embed_planar, occurrence_counts, Formula1in3, FormulaError, SolveMode,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("the incidence graph is not planar")]
    NonPlanar,
    #[error("equality verifier needs two distinct variables, got {0} twice")]
    SameVariable(usize),
    #[error("sorting gadget needs a multiple of three inputs, got {0}")]
    InputCount(usize),
    #[error("face {face} needs balancing but shares no chain with the rest of its component")]
    Degenerate { face: usize },
    #[error("constructed instance failed an internal check: {0}")]
    Internal(String),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

pub type Result<T, E = ReductionError> = std::result::Result<T, E>;

/// Allocates variables and collects clauses.
#[derive(Clone, Debug, Default)]
pub struct Builder {
    /// Name of variable `i + 1`.
    pub names: Vec<String>,
    pub clauses: Vec<[usize; 3]>,
    counter: BTreeMap<&'static str, usize>,
}

impl Builder {
    pub fn new() -> Builder {
        Builder::default()
    }

    pub fn named(&mut self, name: String) -> usize {
        self.names.push(name);
        self.names.len()
    }

    /// Fresh variable tagged with the component kind, instance and role.
    pub fn fresh(&mut self, kind: &'static str, instance: usize, role: &str) -> usize {
        self.named(format!("{kind}{instance}.{role}"))
    }

    fn instance(&mut self, kind: &'static str) -> usize {
        let c = self.counter.entry(kind).or_insert(0);
        *c += 1;
        *c
    }

    fn emit(&mut self, comp: &mut ComponentClauses, clause: [usize; 3]) {
        self.clauses.push(clause);
        comp.clauses.push(clause);
    }

    pub fn formula(&self) -> Result<Formula1in3> {
        Ok(Formula1in3::new(self.names.len(), self.clauses.clone())?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ComponentKind {
    EqualityVerifier,
    Chain,
    Triangle,
    PartialSwitch,
    OptionalSwitch,
    ThreeWayVerifier,
    SortingGadget,
}

impl ComponentKind {
    pub fn tag(self) -> &'static str {
        match self {
            ComponentKind::EqualityVerifier => "eq",
            ComponentKind::Chain => "chain",
            ComponentKind::Triangle => "tri",
            ComponentKind::PartialSwitch => "ps",
            ComponentKind::OptionalSwitch => "os",
            ComponentKind::ThreeWayVerifier => "v3",
            ComponentKind::SortingGadget => "sort",
        }
    }
}

/// Clauses added by one component, with its external and fresh variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentClauses {
    pub kind: ComponentKind,
    pub ports: Vec<(String, usize)>,
    pub internals: Vec<usize>,
    pub clauses: Vec<[usize; 3]>,
}

impl ComponentClauses {
    fn new(kind: ComponentKind) -> ComponentClauses {
        ComponentClauses {
            kind,
            ports: Vec::new(),
            internals: Vec::new(),
            clauses: Vec::new(),
        }
    }

    pub fn port(&self, name: &str) -> Option<usize> {
        self.ports.iter().find(|(n, _)| n == name).map(|&(_, v)| v)
    }

    fn fresh(&mut self, b: &mut Builder, instance: usize, role: &str) -> usize {
        let v = b.fresh(self.kind.tag(), instance, role);
        self.internals.push(v);
        v
    }
}

/// `(v1,x,y)` and `(v2,x,y)`: forces `v1 = v2`.
pub fn equality_verifier(b: &mut Builder, v1: usize, v2: usize) -> Result<ComponentClauses> {
    if v1 == v2 {
        return Err(ReductionError::SameVariable(v1));
    }
    let id = b.instance("eq");
    let mut c = ComponentClauses::new(ComponentKind::EqualityVerifier);
    c.ports = vec![("v1".into(), v1), ("v2".into(), v2)];
    let x = c.fresh(b, id, "x");
    let y = c.fresh(b, id, "y");
    b.emit(&mut c, [v1, x, y]);
    b.emit(&mut c, [v2, x, y]);
    Ok(c)
}

/// Three equality verifiers `v1-u`, `u-w`, `w-v2`.
pub fn chain(b: &mut Builder, v1: usize, v2: usize) -> Result<ComponentClauses> {
    if v1 == v2 {
        return Err(ReductionError::SameVariable(v1));
    }
    let id = b.instance("chain");
    let mut c = ComponentClauses::new(ComponentKind::Chain);
    c.ports = vec![("v1".into(), v1), ("v2".into(), v2)];
    let u = c.fresh(b, id, "u");
    let w = c.fresh(b, id, "w");
    for (p, q) in [(v1, u), (u, w), (w, v2)] {
        let ev = equality_verifier(b, p, q)?;
        c.internals.extend(&ev.internals);
        c.clauses.extend(ev.clauses);
    }
    Ok(c)
}

/// Acts as the clause `(a,b,c)` but uses two occurrences of each port.
pub fn triangle(b: &mut Builder, pa: usize, pb: usize, pc: usize) -> ComponentClauses {
    let id = b.instance("tri");
    let mut c = ComponentClauses::new(ComponentKind::Triangle);
    c.ports = vec![("a".into(), pa), ("b".into(), pb), ("c".into(), pc)];
    let a2 = c.fresh(b, id, "a'");
    let b2 = c.fresh(b, id, "b'");
    let c2 = c.fresh(b, id, "c'");
    for cl in [[pa, pb, c2], [pb, a2, c2], [pc, a2, b2], [pa, pc, b2], [a2, b2, c2]] {
        b.emit(&mut c, cl);
    }
    c
}

/// Copies `{p, q}` onto fresh outputs `r, s` in either order; unsatisfiable
/// when both inputs are true.
pub fn partial_switch(b: &mut Builder, p: usize, q: usize) -> ComponentClauses {
    let id = b.instance("ps");
    let mut c = ComponentClauses::new(ComponentKind::PartialSwitch);
    let r = b.fresh("ps", id, "r");
    let s = b.fresh("ps", id, "s");
    c.ports = vec![("p".into(), p), ("q".into(), q), ("r".into(), r), ("s".into(), s)];
    let t = c.fresh(b, id, "t");
    let ia = c.fresh(b, id, "a");
    let ib = c.fresh(b, id, "b");
    let ic = c.fresh(b, id, "c");
    let tri = triangle(b, ia, ib, ic);
    c.internals.extend(&tri.internals);
    c.clauses.extend(tri.clauses);
    for cl in [[p, q, t], [ib, r, t], [ic, s, t], [ia, r, s]] {
        b.emit(&mut c, cl);
    }
    c
}

/// Exits are any permutation of the entries, including two trues.
///
/// A fresh lane `z` beside the entries can absorb one true value: three
/// partial switches route it, and a 3-way verifier on `(y3, z, z)` makes the
/// leftover lane agree with `z`, which gives `z` its three occurrences.
pub fn optional_switch(b: &mut Builder, e1: usize, e2: usize) -> ComponentClauses {
    let id = b.instance("os");
    let mut c = ComponentClauses::new(ComponentKind::OptionalSwitch);
    let z = c.fresh(b, id, "z");
    let ps1 = partial_switch(b, e2, z);
    let (x2, x3) = (ps1.port("r").unwrap(), ps1.port("s").unwrap());
    let ps2 = partial_switch(b, e1, x2);
    let (o1, y2) = (ps2.port("r").unwrap(), ps2.port("s").unwrap());
    let ps3 = partial_switch(b, y2, x3);
    let (o2, y3) = (ps3.port("r").unwrap(), ps3.port("s").unwrap());
    let v3 = three_way_verifier(b, y3, z, z);
    for (sub, outs) in [(ps1, vec![x2, x3]), (ps2, vec![y2]), (ps3, vec![y3])] {
        c.internals.extend(&sub.internals);
        c.internals.extend(outs);
        c.clauses.extend(sub.clauses);
    }
    c.internals.extend(&v3.internals);
    c.clauses.extend(v3.clauses);
    c.ports = vec![("e1".into(), e1), ("e2".into(), e2), ("o1".into(), o1), ("o2".into(), o2)];
    c
}

/// Satisfiable iff `a = b = c`.
pub fn three_way_verifier(b: &mut Builder, pa: usize, pb: usize, pc: usize) -> ComponentClauses {
    let id = b.instance("v3");
    let mut c = ComponentClauses::new(ComponentKind::ThreeWayVerifier);
    c.ports = vec![("a".into(), pa), ("b".into(), pb), ("c".into(), pc)];
    let d = c.fresh(b, id, "d");
    let e = c.fresh(b, id, "e");
    let f = c.fresh(b, id, "f");
    let g = c.fresh(b, id, "g");
    let h = c.fresh(b, id, "h");
    for cl in [[pa, d, e], [pb, e, g], [pc, g, h], [d, e, f], [f, g, h], [d, f, h]] {
        b.emit(&mut c, cl);
    }
    c
}

/// Inputs to a face gadget and the number of trues it accepts, modulo 3.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetSpec {
    pub inputs: Vec<usize>,
    pub c: usize,
}

impl GadgetSpec {
    pub fn m(&self) -> usize {
        self.inputs.len() / 3
    }
}

/// Brick-wall network of optional switches, then one checker per output
/// triple: a clause for the last `c` triples, a 3-way verifier for the rest.
pub fn sorting_gadget(b: &mut Builder, spec: &GadgetSpec) -> Result<ComponentClauses> {
    Ok(build_sorting_gadget(b, spec, &mut Vec::new())?.0)
}

/// A block of consecutive clauses drawn as one unit, with its attachment
/// variables in counter-clockwise order around it.
#[derive(Clone, Debug)]
struct Piece {
    clauses: std::ops::Range<usize>,
    ports: Vec<usize>,
    /// Lane index of each port; pieces meeting at a variable are ordered by it.
    lane: BTreeMap<usize, usize>,
}

impl Piece {
    fn new(clauses: std::ops::Range<usize>, ports: &[(usize, usize)]) -> Piece {
        let mut p = Piece {
            clauses,
            ports: Vec::new(),
            lane: BTreeMap::new(),
        };
        for &(v, lane) in ports {
            if p.ports.last() != Some(&v) {
                p.ports.push(v);
            }
            let e = p.lane.entry(v).or_insert(lane);
            *e = (*e).max(lane);
        }
        p
    }
}

/// Optional switch in a network: its left lane and its two exits.
pub type Switch = (usize, usize, usize);

fn build_sorting_gadget(
    b: &mut Builder,
    spec: &GadgetSpec,
    pieces: &mut Vec<Piece>,
) -> Result<(ComponentClauses, Vec<Switch>)> {
    let n = spec.inputs.len();
    if n % 3 != 0 {
        return Err(ReductionError::InputCount(n));
    }
    let m = n / 3;
    let c_mod = spec.c % 3;
    if c_mod > m {
        return Err(ReductionError::Internal(format!(
            "{m} triples cannot hold {c_mod} clause checkers"
        )));
    }
    let mut comp = ComponentClauses::new(ComponentKind::SortingGadget);
    comp.ports = spec
        .inputs
        .iter()
        .enumerate()
        .map(|(i, &v)| (format!("in{i}"), v))
        .collect();
    // lanes run left to right with inputs along the bottom edge
    let mut lanes = spec.inputs.clone();
    let mut switches = Vec::new();
    for layer in 0..n {
        let mut i = layer % 2;
        while i + 1 < n {
            let start = b.clauses.len();
            let os = optional_switch(b, lanes[i], lanes[i + 1]);
            let (o1, o2) = (os.port("o1").unwrap(), os.port("o2").unwrap());
            pieces.push(Piece::new(
                start..b.clauses.len(),
                &[(lanes[i], i), (lanes[i + 1], i + 1), (o2, i + 1), (o1, i)],
            ));
            lanes[i] = o1;
            lanes[i + 1] = o2;
            switches.push((i, o1, o2));
            comp.internals.extend(&os.internals);
            comp.internals.extend([o1, o2]);
            comp.clauses.extend(os.clauses);
            i += 2;
        }
    }
    for t in 0..m {
        let tri = [lanes[3 * t], lanes[3 * t + 1], lanes[3 * t + 2]];
        let start = b.clauses.len();
        if t >= m - c_mod {
            b.emit(&mut comp, tri);
        } else {
            let v3 = three_way_verifier(b, tri[0], tri[1], tri[2]);
            comp.internals.extend(&v3.internals);
            comp.clauses.extend(v3.clauses);
        }
        let ports: Vec<(usize, usize)> = (0..3).map(|k| (tri[k], 3 * t + k)).collect();
        pieces.push(Piece::new(start..b.clauses.len(), &ports));
    }
    Ok((comp, switches))
}

/// Exit values of every switch that carry `input` to an arrangement the
/// checkers accept, by odd-even transposition sort; `None` if the number of
/// trues is not accepted.
pub fn route_gadget(input: &[bool], c: usize, switches: &[Switch]) -> Option<Vec<(usize, bool)>> {
    let n = input.len();
    let m = n / 3;
    let c = c % 3;
    let k = input.iter().filter(|&&x| x).count();
    if k < c || (k - c) % 3 != 0 || (k - c) / 3 > m - c {
        return None;
    }
    let full = (k - c) / 3;
    let target: Vec<bool> = (0..n).map(|j| j < 3 * full || (j / 3 >= m - c && j % 3 == 0)).collect();
    let mut slots = [Vec::new(), Vec::new()];
    for (j, &t) in target.iter().enumerate().rev() {
        slots[usize::from(t)].push(j);
    }
    let mut key: Vec<(usize, bool)> = input.iter().map(|&x| (slots[usize::from(x)].pop().expect("counts match"), x)).collect();
    let mut out = Vec::with_capacity(2 * switches.len());
    for &(i, o1, o2) in switches {
        if key[i].0 > key[i + 1].0 {
            key.swap(i, i + 1);
        }
        out.push((o1, key[i].1));
        out.push((o2, key[i + 1].1));
    }
    debug_assert!(key.iter().enumerate().all(|(j, &(d, _))| d == j));
    Some(out)
}

/// Rotation of a piece in local numbering: variables first, then clauses.
/// Port lists stop short of the outer face, which lies between their last
/// and first entries.
#[derive(Clone, Debug)]
struct LocalEmbedding {
    rotation: Vec<Vec<usize>>,
}

/// Piece shape with variables renumbered by first appearance, ports first.
type ShapeKey = (Vec<usize>, Vec<[usize; 3]>);

fn shape_of(clauses: &[[usize; 3]], ports: &[usize]) -> (ShapeKey, Vec<usize>) {
    let mut local: HashMap<usize, usize> = HashMap::new();
    let mut vars = Vec::new();
    let mut id = |v: usize, vars: &mut Vec<usize>| {
        *local.entry(v).or_insert_with(|| {
            vars.push(v);
            vars.len() - 1
        })
    };
    let p: Vec<usize> = ports.iter().map(|&v| id(v, &mut vars)).collect();
    let cl: Vec<[usize; 3]> = clauses.iter().map(|c| c.map(|v| id(v, &mut vars))).collect();
    ((p, cl), vars)
}

fn embed_shape(key: &ShapeKey, nvars: usize) -> Result<LocalEmbedding> {
    let (ports, clauses) = key;
    let hub = nvars + clauses.len();
    let mut g = Graph::new(hub + 1);
    for (j, c) in clauses.iter().enumerate() {
        for &v in c {
            g.add_edge(v, nvars + j);
        }
    }
    for &p in ports {
        g.add_edge(hub, p);
    }
    if ports.len() >= 3 {
        for i in 0..ports.len() {
            g.add_edge(ports[i], ports[(i + 1) % ports.len()]);
        }
    }
    let mut rot = planar_embedding(&g)
        .map_err(|_| ReductionError::Internal("gadget piece is not planar".into()))?
        .rotation;
    if ports.len() >= 3 {
        let h = &rot[hub];
        let at = h.iter().position(|&x| x == ports[0]).expect("hub sees every port");
        // seen from the hub, the ports must run clockwise around the piece
        if h[(at + 1) % h.len()] == ports[1] {
            for r in &mut rot {
                r.reverse();
            }
        }
    }
    let mut rotation = Vec::with_capacity(hub);
    for r in rot.into_iter().take(hub) {
        let list = match r.iter().position(|&x| x == hub) {
            Some(h) => r[h + 1..]
                .iter()
                .chain(&r[..h])
                .copied()
                .filter(|&x| x >= nvars)
                .collect(),
            None => r,
        };
        rotation.push(list);
    }
    Ok(LocalEmbedding { rotation })
}

/// Rotation system of E″: the rotation of E′, with every face gadget drawn
/// inside its face and attached at the corners where its inputs were taken.
fn splice_embedding(
    out: &Formula1in3,
    host: &RotationSystem,
    host_vars: usize,
    corners: &BTreeMap<usize, usize>,
    pieces: &[Piece],
) -> Result<RotationSystem> {
    let nv = out.num_vars;
    let remap = |x: usize| if x < host_vars { x } else { x - host_vars + nv };
    let mut rotation = vec![Vec::new(); nv + out.clauses.len()];
    for (x, r) in host.rotation.iter().enumerate() {
        rotation[remap(x)] = r.iter().map(|&y| remap(y)).collect();
    }
    let mut cache: HashMap<ShapeKey, LocalEmbedding> = HashMap::new();
    let mut contrib: BTreeMap<usize, Vec<(usize, Vec<usize>)>> = BTreeMap::new();
    for piece in pieces {
        let (key, vars) = shape_of(&out.clauses[piece.clauses.clone()], &piece.ports);
        if !cache.contains_key(&key) {
            let emb = embed_shape(&key, vars.len())?;
            cache.insert(key.clone(), emb);
        }
        let emb = &cache[&key];
        let global = |x: usize| {
            if x < vars.len() {
                vars[x] - 1
            } else {
                nv + piece.clauses.start + x - vars.len()
            }
        };
        for (x, r) in emb.rotation.iter().enumerate() {
            let list: Vec<usize> = r.iter().map(|&y| global(y)).collect();
            if x < vars.len() && piece.lane.contains_key(&vars[x]) {
                contrib.entry(vars[x] - 1).or_default().push((piece.lane[&vars[x]], list));
            } else {
                rotation[global(x)] = list;
            }
        }
    }
    for (v, mut parts) in contrib {
        parts.sort_by(|a, b| b.0.cmp(&a.0));
        let list: Vec<usize> = parts.into_iter().flat_map(|(_, l)| l).collect();
        match corners.get(&(v + 1)) {
            Some(&u) => {
                let r = &mut rotation[v];
                let at = r.iter().position(|&x| x == remap(u)).expect("corner lies on the rotation");
                r.splice(at + 1..at + 1, list);
            }
            None => rotation[v].extend(list),
        }
    }
    Ok(RotationSystem { rotation })
}

/// One equality verifier as placed by stage one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifierInfo {
    pub v1: usize,
    pub v2: usize,
    pub x: usize,
    pub y: usize,
    /// Clause indices of `(v1,x,y)` and `(v2,x,y)`.
    pub k1: usize,
    pub k2: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainInfo {
    /// Original variable whose copies the chain links.
    pub var: usize,
    pub u: usize,
    pub w: usize,
    pub links: [VerifierInfo; 3],
}

/// Output of the first stage.
#[derive(Clone, Debug)]
pub struct SplitResult {
    /// E′ with its embedding.
    pub formula: Formula1in3,
    pub names: Vec<String>,
    pub chains: Vec<ChainInfo>,
    /// Variable → number of missing occurrences, for variables below three.
    pub spares: BTreeMap<usize, usize>,
    /// Original variable → its copies in rotation order.
    pub copies: BTreeMap<usize, Vec<usize>>,
}

impl SplitResult {
    pub fn total_missing(&self) -> usize {
        self.spares.values().sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Node {
    Var(usize),
    Clause(usize),
}

/// Replaces every variable with `k > 1` occurrences by `k` copies linked by
/// `k - 1` chains, following the cyclic order of its edges. The link between
/// the last and first copy is omitted.
pub fn split_occurrences(e: &Formula1in3) -> Result<SplitResult> {
    let emb = embed_planar(e).ok_or(ReductionError::NonPlanar)?;
    let rot = &emb.rotation.rotation;
    let n = e.num_vars;
    let mut b = Builder::new();
    let mut rotation: BTreeMap<Node, Vec<Node>> = BTreeMap::new();
    // copy of variable i (1-based) adjacent to clause j
    let mut copy_at: HashMap<(usize, usize), usize> = HashMap::new();
    let mut copies: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 1..=n {
        let clauses: Vec<usize> = rot[i - 1].iter().map(|&cv| cv - n).collect();
        match clauses.len() {
            0 => {}
            1 => {
                let v = b.named(format!("x{i}"));
                copy_at.insert((i, clauses[0]), v);
                copies.insert(i, vec![v]);
            }
            k => {
                let vs: Vec<usize> = (1..=k).map(|j| b.named(format!("x{i}.{j}"))).collect();
                for (j, &cj) in clauses.iter().enumerate() {
                    copy_at.insert((i, cj), vs[j]);
                }
                copies.insert(i, vs);
            }
        }
    }
    b.clauses = e
        .clauses
        .iter()
        .enumerate()
        .map(|(j, c)| c.map(|v| copy_at[&(v, j)]))
        .collect();
    for j in 0..e.clauses.len() {
        let r = rot[n + j]
            .iter()
            .map(|&vv| Node::Var(copy_at[&(vv + 1, j)]))
            .collect();
        rotation.insert(Node::Clause(j), r);
    }
    let mut chains = Vec::new();
    for (&i, vs) in &copies {
        let clauses: Vec<usize> = rot[i - 1].iter().map(|&cv| cv - n).collect();
        if vs.len() == 1 {
            rotation.insert(Node::Var(vs[0]), vec![Node::Clause(clauses[0])]);
            continue;
        }
        let mut next: Vec<Option<Node>> = vec![None; vs.len()];
        let mut prev: Vec<Option<Node>> = vec![None; vs.len()];
        for j in 0..vs.len() - 1 {
            let ch = chain(&mut b, vs[j], vs[j + 1])?;
            let (u, w) = (ch.internals[0], ch.internals[1]);
            let base = b.clauses.len() - 6;
            let links: Vec<VerifierInfo> = (0..3)
                .map(|l| {
                    let k1 = base + 2 * l;
                    let k2 = k1 + 1;
                    let [v1, x, y] = b.clauses[k1];
                    let v2 = b.clauses[k2][0];
                    VerifierInfo { v1, v2, x, y, k1, k2 }
                })
                .collect();
            for l in &links {
                rotation.insert(
                    Node::Clause(l.k1),
                    vec![Node::Var(l.v1), Node::Var(l.y), Node::Var(l.x)],
                );
                rotation.insert(
                    Node::Clause(l.k2),
                    vec![Node::Var(l.v2), Node::Var(l.x), Node::Var(l.y)],
                );
                rotation.insert(Node::Var(l.x), vec![Node::Clause(l.k1), Node::Clause(l.k2)]);
                rotation.insert(Node::Var(l.y), vec![Node::Clause(l.k1), Node::Clause(l.k2)]);
            }
            rotation.insert(Node::Var(u), vec![Node::Clause(links[0].k2), Node::Clause(links[1].k1)]);
            rotation.insert(Node::Var(w), vec![Node::Clause(links[1].k2), Node::Clause(links[2].k1)]);
            next[j] = Some(Node::Clause(links[0].k1));
            prev[j + 1] = Some(Node::Clause(links[2].k2));
            chains.push(ChainInfo {
                var: i,
                u,
                w,
                links: [links[0].clone(), links[1].clone(), links[2].clone()],
            });
        }
        for (j, &v) in vs.iter().enumerate() {
            let mut r = vec![Node::Clause(clauses[j])];
            r.extend(next[j]);
            r.extend(prev[j]);
            rotation.insert(Node::Var(v), r);
        }
    }
    let mut f = b.formula()?;
    let nv = f.num_vars;
    let idx = |x: &Node| match *x {
        Node::Var(v) => v - 1,
        Node::Clause(j) => nv + j,
    };
    let mut rs = vec![Vec::new(); nv + f.clauses.len()];
    for (k, r) in &rotation {
        rs[idx(k)] = r.iter().map(idx).collect();
    }
    let rs = RotationSystem { rotation: rs };
    if !rs.is_planar_embedding(&f.incidence_graph()) {
        return Err(ReductionError::Internal("split embedding is not planar".into()));
    }
    f.embedding = Some(rs);
    let spares = occurrence_counts(&f)
        .counts
        .into_iter()
        .filter(|&(_, k)| k < 3)
        .map(|(v, k)| (v, 3 - k))
        .collect();
    Ok(SplitResult {
        formula: f,
        names: b.names,
        chains,
        spares,
        copies,
    })
}

/// Spare occurrences collected by one face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceEntry {
    pub face: usize,
    pub component: usize,
    pub trivial: bool,
    pub is_root: bool,
    /// Spare occurrences in boundary order (a variable may repeat).
    pub occurrences: Vec<usize>,
    /// Variable → the vertex preceding it on the face boundary where its
    /// occurrences are taken.
    pub corners: BTreeMap<usize, usize>,
    /// Required number of true occurrences, modulo 3.
    pub truth_target: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceLedger {
    pub faces: Vec<FaceEntry>,
    /// Chains whose two free occurrences were split between faces.
    pub tree_chains: usize,
}

impl FaceLedger {
    pub fn total(&self) -> usize {
        self.faces.iter().map(|f| f.occurrences.len()).sum()
    }
}

/// Assigns every missing occurrence of E′ to a face so that each face holds
/// a multiple of three, moving the free occurrences of chain variables along
/// a spanning tree of faces rooted at each component's outer face.
pub fn balance_faces(split: &SplitResult) -> Result<FaceLedger> {
    let f = &split.formula;
    let rs = f.embedding.as_ref().expect("split result is embedded");
    let faces = rs.faces();
    let nv = f.num_vars;
    let var_vertex = |v: usize| v - 1;

    let mut trivial = vec![false; faces.len()];
    let mut diamonds: BTreeSet<Vec<usize>> = BTreeSet::new();
    for ch in &split.chains {
        for l in &ch.links {
            let mut d = vec![var_vertex(l.x), var_vertex(l.y), nv + l.k1, nv + l.k2];
            d.sort_unstable();
            diamonds.insert(d);
        }
    }
    for (i, face) in faces.iter().enumerate() {
        if face.len() == 4 {
            let mut vs: Vec<usize> = face.iter().map(|&(u, _)| u).collect();
            vs.sort_unstable();
            trivial[i] = diamonds.contains(&vs);
        }
    }
    // corners: vertex -> faces it lies on, in face order
    let mut corners: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, face) in faces.iter().enumerate() {
        for &(_, v) in face {
            corners.entry(v).or_default().push(i);
        }
    }
    let comps = f.incidence_graph().components();
    let mut comp_of = vec![0; nv + f.clauses.len()];
    for (ci, c) in comps.iter().enumerate() {
        for &v in c {
            comp_of[v] = ci;
        }
    }
    let face_comp: Vec<usize> = faces.iter().map(|fc| comp_of[fc[0].0]).collect();
    let nontrivial_faces = |v: usize| -> Vec<usize> {
        let mut fs: Vec<usize> = corners[&var_vertex(v)]
            .iter()
            .copied()
            .filter(|&i| !trivial[i])
            .collect();
        fs.sort_unstable();
        fs.dedup();
        fs
    };

    let mut assigned: BTreeMap<usize, Vec<usize>> = BTreeMap::new(); // face -> vars
    let mut count = vec![0usize; faces.len()];
    let flexible: BTreeSet<usize> = split.chains.iter().flat_map(|c| [c.u, c.w]).collect();
    for (&v, &k) in &split.spares {
        if flexible.contains(&v) {
            continue;
        }
        let fs = nontrivial_faces(v);
        let face = *fs
            .first()
            .ok_or_else(|| ReductionError::Internal(format!("variable {v} touches no face")))?;
        for _ in 0..k {
            assigned.entry(face).or_default().push(v);
        }
        count[face] += k;
    }
    // chain edges of the face tree
    let mut adj: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for (ci, ch) in split.chains.iter().enumerate() {
        let fs = nontrivial_faces(ch.u);
        if fs.len() == 2 {
            adj.entry(fs[0]).or_default().push((fs[1], ci));
            adj.entry(fs[1]).or_default().push((fs[0], ci));
        }
    }
    let mut roots: BTreeMap<usize, usize> = BTreeMap::new();
    for (ci, _) in comps.iter().enumerate() {
        let mut best: Option<usize> = None;
        for (i, fc) in faces.iter().enumerate() {
            if face_comp[i] == ci && !trivial[i] && best.is_none_or(|b| fc.len() > faces[b].len()) {
                best = Some(i);
            }
        }
        if let Some(b) = best {
            roots.insert(ci, b);
        }
    }
    let mut parent: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    let mut order = Vec::new();
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    for &root in roots.values() {
        seen.insert(root);
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for &(y, ch) in adj.get(&x).map(|v| v.as_slice()).unwrap_or(&[]) {
                if seen.insert(y) {
                    parent.insert(y, (x, ch));
                    queue.push_back(y);
                }
            }
        }
    }
    let tree_chains: BTreeSet<usize> = parent.values().map(|&(_, ch)| ch).collect();
    for (ci, ch) in split.chains.iter().enumerate() {
        if tree_chains.contains(&ci) {
            continue;
        }
        let face = nontrivial_faces(ch.u)[0];
        assigned.entry(face).or_default().extend([ch.u, ch.w]);
        count[face] += 2;
    }
    for &x in order.iter().rev() {
        let Some(&(p, ci)) = parent.get(&x) else {
            continue;
        };
        let ch = &split.chains[ci];
        let keep = (3 - count[x] % 3) % 3;
        let flex = [ch.u, ch.w];
        for (i, &v) in flex.iter().enumerate() {
            let face = if i < keep { x } else { p };
            assigned.entry(face).or_default().push(v);
            count[face] += 1;
        }
    }
    for (i, &c) in count.iter().enumerate() {
        if !trivial[i] && !seen.contains(&i) && c % 3 != 0 {
            return Err(ReductionError::Degenerate { face: i });
        }
    }
    let clauses_in_comp = |ci: usize| {
        (0..f.clauses.len())
            .filter(|&j| comp_of[nv + j] == ci)
            .count()
    };
    let mut entries = Vec::new();
    for (i, face) in faces.iter().enumerate() {
        let comp = face_comp[i];
        let is_root = roots.get(&comp) == Some(&i);
        // boundary order: the first corner at each assigned variable
        let mut pending: BTreeMap<usize, usize> = BTreeMap::new();
        for &v in assigned.get(&i).map(|v| v.as_slice()).unwrap_or(&[]) {
            *pending.entry(v).or_insert(0) += 1;
        }
        let mut occurrences = Vec::new();
        let mut corner_at = BTreeMap::new();
        for &(prev, vertex) in face {
            if vertex < nv {
                if let Some(k) = pending.remove(&(vertex + 1)) {
                    occurrences.extend(std::iter::repeat_n(vertex + 1, k));
                    corner_at.insert(vertex + 1, prev);
                }
            }
        }
        debug_assert!(pending.is_empty());
        let truth_target = if is_root {
            (3 - clauses_in_comp(comp) % 3) % 3
        } else {
            0
        };
        if !trivial[i] && occurrences.len() % 3 != 0 {
            return Err(ReductionError::Degenerate { face: i });
        }
        entries.push(FaceEntry {
            face: i,
            component: comp,
            trivial: trivial[i],
            is_root,
            occurrences,
            corners: corner_at,
            truth_target,
        });
    }
    Ok(FaceLedger {
        faces: entries,
        tree_chains: tree_chains.len(),
    })
}

/// Size statistics of a reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionReport {
    pub input_vars: usize,
    pub input_clauses: usize,
    pub split_vars: usize,
    pub split_clauses: usize,
    pub chains: usize,
    pub gadgets: usize,
    pub padding_vars: usize,
    pub output_vars: usize,
    pub output_clauses: usize,
    pub ledger: FaceLedger,
}

impl fmt::Display for ReductionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "input: {} variables, {} clauses", self.input_vars, self.input_clauses)?;
        writeln!(f, "split: {} variables, {} clauses, {} chains", self.split_vars, self.split_clauses, self.chains)?;
        writeln!(f, "gadgets: {} (padding variables {})", self.gadgets, self.padding_vars)?;
        writeln!(f, "output: {} variables, {} clauses", self.output_vars, self.output_clauses)?;
        for e in &self.ledger.faces {
            if e.trivial {
                continue;
            }
            let mut line = format!("face {}: {} occurrences, target {}", e.face, e.occurrences.len(), e.truth_target);
            if e.is_root {
                line.push_str(" (root)");
            }
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// One face gadget of E″.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetRecord {
    pub face: usize,
    /// Inputs in lane order, padding included.
    pub inputs: Vec<usize>,
    pub c: usize,
    pub switches: Vec<Switch>,
}

#[derive(Clone, Debug)]
pub struct CubicReduction {
    pub formula: Formula1in3,
    pub names: Vec<String>,
    pub report: ReductionReport,
    pub split: SplitResult,
    pub gadgets: Vec<GadgetRecord>,
}

/// Number of always-free padding variables a face gadget needs so that it
/// accepts every count of true inputs congruent to `c`.
fn padding(m: usize, c: usize) -> usize {
    match c % 3 {
        0 => 0,
        1 => usize::from(m == 0),
        _ => if m == 0 { 2 } else { 1 },
    }
}

/// Builds E″: every variable occurs exactly three times, the incidence graph
/// is planar, and E″ is satisfiable iff E is.
pub fn reduce_to_cubic(e: &Formula1in3) -> Result<CubicReduction> {
    let split = split_occurrences(e)?;
    let ledger = balance_faces(&split)?;
    let mut b = Builder {
        names: split.names.clone(),
        clauses: split.formula.clauses.clone(),
        counter: BTreeMap::new(),
    };
    let mut gadgets = 0;
    let mut padding_vars = 0;
    let mut pieces = Vec::new();
    let mut corners = BTreeMap::new();
    let mut records = Vec::new();
    for entry in &ledger.faces {
        if entry.trivial {
            continue;
        }
        let m = entry.occurrences.len() / 3;
        let pad = padding(m, entry.truth_target);
        if m + pad == 0 {
            continue;
        }
        // the face trace runs against the gadget's counter-clockwise inputs
        let mut inputs: Vec<usize> = entry.occurrences.iter().rev().copied().collect();
        for p in 0..pad {
            let v = b.named(format!("pad{}.{p}", entry.face));
            inputs.extend([v, v, v]);
        }
        padding_vars += pad;
        corners.extend(&entry.corners);
        let (_, switches) = build_sorting_gadget(
            &mut b,
            &GadgetSpec {
                inputs: inputs.clone(),
                c: entry.truth_target,
            },
            &mut pieces,
        )?;
        records.push(GadgetRecord {
            face: entry.face,
            inputs,
            c: entry.truth_target,
            switches,
        });
        gadgets += 1;
    }
    let mut out = b.formula()?;
    let occ = occurrence_counts(&out);
    if !occ.is_cubic || occ.counts.len() != out.num_vars {
        return Err(ReductionError::Internal("output is not cubic".into()));
    }
    let host = split.formula.embedding.as_ref().expect("split result is embedded");
    let rs = splice_embedding(&out, host, split.formula.num_vars, &corners, &pieces)?;
    if !rs.is_planar_embedding(&out.incidence_graph()) {
        return Err(ReductionError::Internal("spliced embedding is not planar".into()));
    }
    out.embedding = Some(rs);
    let report = ReductionReport {
        input_vars: e.num_vars,
        input_clauses: e.clauses.len(),
        split_vars: split.formula.num_vars,
        split_clauses: split.formula.clauses.len(),
        chains: split.chains.len(),
        gadgets,
        padding_vars,
        output_vars: out.num_vars,
        output_clauses: out.clauses.len(),
        ledger,
    };
    Ok(CubicReduction {
        formula: out,
        names: b.names,
        report,
        split,
        gadgets: records,
    })
}

/// Extends a model of E to a model of E″, or `None` if the extension search
/// fails. Chain verifiers on false variables choose which of `x`, `y` is
/// true so that every gadget sees an accepted count, each gadget is routed to
/// an accepted arrangement, and the switch interiors are then solved with
/// their ports fixed.
pub fn lift_model(red: &CubicReduction, model: &[bool], max_nodes: Option<u64>) -> Result<Option<Vec<bool>>> {
    let split = &red.split;
    let nv = split.formula.num_vars;
    let mut value: Vec<Option<bool>> = vec![None; nv];
    for (&i, vs) in &split.copies {
        for &v in vs {
            value[v - 1] = Some(model[i - 1]);
        }
    }
    let mut choices = Vec::new();
    for ch in &split.chains {
        let t = model[ch.var - 1];
        value[ch.u - 1] = Some(t);
        value[ch.w - 1] = Some(t);
        for l in &ch.links {
            if t {
                value[l.x - 1] = Some(false);
                value[l.y - 1] = Some(false);
            } else {
                choices.push((l.x, l.y));
            }
        }
    }
    // gadget inputs by variable, with multiplicity
    let mut feeds: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (g, rec) in red.gadgets.iter().enumerate() {
        for &v in &rec.inputs {
            if v <= nv {
                feeds.entry(v).or_default().push(g);
            }
        }
    }
    let mut trues = vec![0usize; red.gadgets.len()];
    let mut open = vec![0usize; red.gadgets.len()];
    for (&v, gs) in &feeds {
        for &g in gs {
            match value[v - 1] {
                Some(true) => trues[g] += 1,
                Some(false) => {}
                None => open[g] += 1,
            }
        }
    }
    let ok = |trues: &[usize], open: &[usize], g: usize| open[g] > 0 || trues[g] % 3 == red.gadgets[g].c % 3;
    // depth-first over the x/y choices, closing gadgets as their inputs fill
    fn search(
        i: usize,
        choices: &[(usize, usize)],
        feeds: &BTreeMap<usize, Vec<usize>>,
        trues: &mut Vec<usize>,
        open: &mut Vec<usize>,
        value: &mut Vec<Option<bool>>,
        ok: &dyn Fn(&[usize], &[usize], usize) -> bool,
    ) -> bool {
        if i == choices.len() {
            return (0..trues.len()).all(|g| ok(trues, open, g));
        }
        let (x, y) = choices[i];
        for (t, f) in [(x, y), (y, x)] {
            value[t - 1] = Some(true);
            value[f - 1] = Some(false);
            let touched: Vec<(usize, usize)> = [t, f]
                .iter()
                .flat_map(|&v| feeds.get(&v).into_iter().flatten().map(move |&g| (v, g)))
                .collect();
            for &(v, g) in &touched {
                open[g] -= 1;
                trues[g] += usize::from(v == t);
            }
            if touched.iter().all(|&(_, g)| ok(trues, open, g))
                && search(i + 1, choices, feeds, trues, open, value, ok)
            {
                return true;
            }
            for &(v, g) in &touched {
                open[g] += 1;
                trues[g] -= usize::from(v == t);
            }
        }
        value[x - 1] = None;
        value[y - 1] = None;
        false
    }
    if !(0..trues.len()).all(|g| ok(&trues, &open, g))
        || !search(0, &choices, &feeds, &mut trues, &mut open, &mut value, &ok)
    {
        return Ok(None);
    }
    let mut fixed: Vec<(usize, bool)> = value
        .iter()
        .enumerate()
        .filter_map(|(i, x)| x.map(|b| (i + 1, b)))
        .collect();
    for rec in &red.gadgets {
        // padding variables are free: try them false, then true
        let routed = [false, true].into_iter().find_map(|pad| {
            let input: Vec<bool> = rec
                .inputs
                .iter()
                .map(|&v| if v <= nv { value[v - 1] == Some(true) } else { pad })
                .collect();
            let pads = rec.inputs.iter().filter(|&&v| v > nv).map(move |&v| (v, pad));
            route_gadget(&input, rec.c, &rec.switches).map(|r| r.into_iter().chain(pads).collect::<Vec<_>>())
        });
        match routed {
            Some(r) => fixed.extend(r),
            None => return Ok(None),
        }
    }
    let out = backtrack_with_fixed(&red.formula, &fixed, SolveMode::Decide, max_nodes)?;
    Ok(out.models.into_iter().next())
}

/// Human-readable clause listing, for debugging.
pub fn describe(names: &[String], clauses: &[[usize; 3]]) -> String {
    let mut s = String::new();
    for c in clauses {
        let _ = writeln!(s, "({}, {}, {})", names[c[0] - 1], names[c[1] - 1], names[c[2] - 1]);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{backtrack_solve_1in3, brute_force_models, eval_1in3};
    use proptest::prelude::*;

    /// Models of the component restricted to its ports, with internal model
    /// counts, by brute force over all variables of the builder.
    fn port_table(b: &Builder, ports: &[usize]) -> BTreeMap<Vec<bool>, usize> {
        let f = b.formula().unwrap();
        let mut t = BTreeMap::new();
        for m in brute_force_models(&f).unwrap() {
            *t.entry(ports.iter().map(|&p| m[p - 1]).collect()).or_insert(0) += 1;
        }
        t
    }

    fn vars(b: &mut Builder, k: usize) -> Vec<usize> {
        (0..k).map(|i| b.named(format!("p{i}"))).collect()
    }

    #[test]
    fn equality_verifier_table() {
        let mut b = Builder::new();
        let p = vars(&mut b, 2);
        equality_verifier(&mut b, p[0], p[1]).unwrap();
        let t = port_table(&b, &p);
        assert_eq!(t, BTreeMap::from([(vec![false, false], 2), (vec![true, true], 1)]));
        assert!(equality_verifier(&mut b, p[0], p[0]).is_err());
    }

    #[test]
    fn chain_table_and_occurrences() {
        let mut b = Builder::new();
        let p = vars(&mut b, 2);
        let ch = chain(&mut b, p[0], p[1]).unwrap();
        let t = port_table(&b, &p);
        assert_eq!(t, BTreeMap::from([(vec![false, false], 8), (vec![true, true], 1)]));
        let occ = occurrence_counts(&b.formula().unwrap()).counts;
        assert_eq!(occ[&ch.internals[0]], 2);
        assert_eq!(occ[&ch.internals[1]], 2);
    }

    #[test]
    fn triangle_table() {
        let mut b = Builder::new();
        let p = vars(&mut b, 3);
        let tri = triangle(&mut b, p[0], p[1], p[2]);
        let t = port_table(&b, &p);
        let one_hot: BTreeMap<Vec<bool>, usize> = [
            vec![true, false, false],
            vec![false, true, false],
            vec![false, false, true],
        ]
        .into_iter()
        .map(|r| (r, 1))
        .collect();
        assert_eq!(t, one_hot);
        let occ = occurrence_counts(&b.formula().unwrap()).counts;
        for v in &tri.internals {
            assert_eq!(occ[v], 3);
        }
        for v in &p {
            assert_eq!(occ[v], 2);
        }
    }

    #[test]
    fn partial_switch_table() {
        let mut b = Builder::new();
        let p = vars(&mut b, 2);
        let ps = partial_switch(&mut b, p[0], p[1]);
        let (r, s) = (ps.port("r").unwrap(), ps.port("s").unwrap());
        let t = port_table(&b, &[p[0], p[1], r, s]);
        let expect = BTreeMap::from([
            (vec![false, false, false, false], 1),
            (vec![false, true, false, true], 1),
            (vec![false, true, true, false], 1),
            (vec![true, false, false, true], 1),
            (vec![true, false, true, false], 1),
        ]);
        assert_eq!(t, expect);
        let occ = occurrence_counts(&b.formula().unwrap()).counts;
        assert_eq!((occ[&p[0]], occ[&p[1]], occ[&r], occ[&s]), (1, 1, 2, 2));
    }

    #[test]
    fn three_way_verifier_table() {
        let mut b = Builder::new();
        let p = vars(&mut b, 3);
        let v3 = three_way_verifier(&mut b, p[0], p[1], p[2]);
        let t = port_table(&b, &p);
        assert_eq!(
            t,
            BTreeMap::from([(vec![false, false, false], 2), (vec![true, true, true], 1)])
        );
        let occ = occurrence_counts(&b.formula().unwrap()).counts;
        for v in &v3.internals {
            assert_eq!(occ[v], 3);
        }
    }

    #[test]
    fn optional_switch_table() {
        let mut b = Builder::new();
        let p = vars(&mut b, 2);
        let os = optional_switch(&mut b, p[0], p[1]);
        let (o1, o2) = (os.port("o1").unwrap(), os.port("o2").unwrap());
        let f = b.formula().unwrap();
        for e1 in [false, true] {
            for e2 in [false, true] {
                for x1 in [false, true] {
                    for x2 in [false, true] {
                        let r = backtrack_with_fixed(
                            &f,
                            &[(p[0], e1), (p[1], e2), (o1, x1), (o2, x2)],
                            SolveMode::Decide,
                            None,
                        )
                        .unwrap();
                        let perm = (x1, x2) == (e1, e2) || (x1, x2) == (e2, e1);
                        assert_eq!(r.satisfiable, perm, "{e1} {e2} -> {x1} {x2}");
                    }
                }
            }
        }
        let occ = occurrence_counts(&f).counts;
        for v in &os.internals {
            assert_eq!(occ[v], 3, "{}", b.names[v - 1]);
        }
        assert_eq!((occ[&p[0]], occ[&p[1]], occ[&o1], occ[&o2]), (1, 1, 2, 2));
    }

    fn gadget_sat(m: usize, c: usize, trues: &[bool]) -> bool {
        let mut b = Builder::new();
        let p = vars(&mut b, 3 * m);
        sorting_gadget(&mut b, &GadgetSpec { inputs: p.clone(), c }).unwrap();
        let f = b.formula().unwrap();
        let fixed: Vec<(usize, bool)> = p.iter().copied().zip(trues.iter().copied()).collect();
        backtrack_with_fixed(&f, &fixed, SolveMode::Decide, None)
            .unwrap()
            .satisfiable
    }

    #[test]
    fn sorting_gadget_examples() {
        assert!(gadget_sat(2, 1, &[false, false, true, false, false, false]));
        assert!(!gadget_sat(1, 0, &[true, true, false]));
        assert!(gadget_sat(1, 0, &[true, true, true]));
        assert!(gadget_sat(1, 0, &[false, false, false]));
        assert!(gadget_sat(1, 1, &[false, true, false]));
        let mut b = Builder::new();
        let p = vars(&mut b, 4);
        assert!(sorting_gadget(&mut b, &GadgetSpec { inputs: p, c: 0 }).is_err());
    }

    #[test]
    fn sorting_gadget_counts_mod_three() {
        // m = 2: every input pattern, every target
        for c in 0..3 {
            for bits in 0u32..64 {
                let trues: Vec<bool> = (0..6).map(|i| bits >> i & 1 == 1).collect();
                let k = bits.count_ones() as usize;
                // accepted: c one-hot triples plus all-equal triples
                let expect = k % 3 == c && k >= c && k <= 6 - 2 * c;
                assert_eq!(gadget_sat(2, c, &trues), expect, "c={c} bits={bits:06b}");
            }
        }
    }

    #[test]
    fn gadget_occurrences_are_cubic() {
        let mut b = Builder::new();
        let p = vars(&mut b, 6);
        let g = sorting_gadget(&mut b, &GadgetSpec { inputs: p.clone(), c: 1 }).unwrap();
        let occ = occurrence_counts(&b.formula().unwrap()).counts;
        for v in &g.internals {
            assert_eq!(occ[v], 3);
        }
        for v in &p {
            assert_eq!(occ[v], 1);
        }
    }

    fn formula(n: usize, cl: &[[usize; 3]]) -> Formula1in3 {
        Formula1in3::new(n, cl.to_vec()).unwrap()
    }

    #[test]
    fn split_examples() {
        let one = split_occurrences(&formula(3, &[[1, 2, 3]])).unwrap();
        assert!(one.chains.is_empty());
        assert_eq!(one.spares.values().copied().collect::<Vec<_>>(), vec![2, 2, 2]);
        let two = split_occurrences(&formula(4, &[[1, 2, 3], [1, 2, 4]])).unwrap();
        assert_eq!(two.chains.len(), 2);
        let occ = occurrence_counts(&two.formula).counts;
        for vs in two.copies.values() {
            if vs.len() == 2 {
                assert_eq!((occ[&vs[0]], occ[&vs[1]]), (2, 2));
            }
        }
        assert_eq!(two.total_missing() % 3, 0);
        for s in [&one, &two] {
            assert!(occurrence_counts(&s.formula).counts.values().all(|&k| k <= 3));
        }
    }

    #[test]
    fn balance_examples() {
        let one = split_occurrences(&formula(3, &[[1, 2, 3]])).unwrap();
        let ledger = balance_faces(&one).unwrap();
        assert_eq!(ledger.faces.len(), 1);
        assert_eq!(ledger.faces[0].occurrences.len(), 6);
        assert_eq!(ledger.faces[0].truth_target, 2);
        let k4 = formula(4, &[[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]]);
        let s = split_occurrences(&k4).unwrap();
        let ledger = balance_faces(&s).unwrap();
        assert_eq!(ledger.total(), s.total_missing());
        for e in &ledger.faces {
            assert_eq!(e.occurrences.len() % 3, 0);
            if e.trivial {
                assert!(e.occurrences.is_empty());
            }
            if e.is_root {
                assert_eq!(e.truth_target, (3 - s.formula.clauses.len() % 3) % 3);
            } else {
                assert_eq!(e.truth_target, 0);
            }
        }
    }

    /// Satisfiable inputs must lift to a checked model of E″; unsatisfiable
    /// ones must be refuted by complete search.
    fn equisatisfiable(e: &Formula1in3) {
        let red = reduce_to_cubic(e).unwrap();
        let out = &red.formula;
        assert!(occurrence_counts(out).is_cubic);
        assert!(out.embedding.is_some());
        match brute_force_models(e).unwrap().first() {
            Some(model) => {
                let lifted = lift_model(&red, model, Some(5_000_000)).unwrap().expect("model lifts");
                assert!(eval_1in3(out, &lifted).unwrap(), "{e:?}");
            }
            None => {
                let r = backtrack_solve_1in3(out, SolveMode::Decide, Some(5_000_000)).unwrap();
                assert!(!r.satisfiable, "{e:?}");
            }
        }
    }

    #[test]
    fn routed_gadgets_complete() {
        use crate::formula::backtrack_with_fixed;
        for m in 1..=3 {
            for c in 0..=2.min(m) {
                let mut b = Builder::new();
                let p = vars(&mut b, 3 * m);
                let (_, switches) =
                    build_sorting_gadget(&mut b, &GadgetSpec { inputs: p.clone(), c }, &mut Vec::new()).unwrap();
                let f = b.formula().unwrap();
                for bits in 0u32..1 << (3 * m) {
                    let input: Vec<bool> = (0..3 * m).map(|i| bits >> i & 1 == 1).collect();
                    let k = bits.count_ones() as usize;
                    let accepted = k % 3 == c && k >= c && k + 2 * c <= 3 * m;
                    let Some(route) = route_gadget(&input, c, &switches) else {
                        assert!(!accepted, "m={m} c={c} {input:?}");
                        continue;
                    };
                    assert!(accepted);
                    let mut fixed: Vec<(usize, bool)> = p.iter().copied().zip(input).collect();
                    fixed.extend(route);
                    let r = backtrack_with_fixed(&f, &fixed, SolveMode::Decide, Some(100_000)).unwrap();
                    assert!(r.satisfiable, "m={m} c={c} bits={bits:b}");
                }
            }
        }
    }

    fn spliced_gadget(inputs_of: &dyn Fn(&mut Builder) -> Vec<usize>, c: usize) -> bool {
        let mut b = Builder::new();
        let inputs = inputs_of(&mut b);
        let host_vars = b.names.len();
        let mut pieces = Vec::new();
        build_sorting_gadget(&mut b, &GadgetSpec { inputs, c }, &mut pieces).unwrap();
        let f = b.formula().unwrap();
        let host = RotationSystem {
            rotation: vec![Vec::new(); host_vars],
        };
        let rs = splice_embedding(&f, &host, host_vars, &BTreeMap::new(), &pieces).unwrap();
        rs.is_planar_embedding(&f.incidence_graph())
    }

    #[test]
    fn gadget_embeddings_are_planar() {
        for m in 1..=3 {
            for c in 0..=2.min(m) {
                assert!(spliced_gadget(&|b| vars(b, 3 * m), c), "m={m} c={c}");
            }
        }
        assert!(spliced_gadget(
            &|b| {
                let v = vars(b, 4);
                vec![v[0], v[0], v[1], v[2], v[2], v[3]]
            },
            0
        ));
        assert!(spliced_gadget(
            &|b| {
                let v = vars(b, 2);
                vec![v[0], v[1], v[1], v[1], v[0], v[0]]
            },
            0
        ));
    }

    #[test]
    fn reduction_examples() {
        equisatisfiable(&formula(3, &[[1, 2, 3]]));
        equisatisfiable(&formula(4, &[[1, 2, 3], [1, 2, 4]]));
        // cubic with four clauses: 3 * trues = 4 is impossible
        equisatisfiable(&formula(4, &[[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn random_reductions_are_equisatisfiable(
            raw in proptest::collection::vec(proptest::sample::subsequence((1..=6usize).collect::<Vec<_>>(), 3), 1..=4)
        ) {
            let clauses: Vec<[usize; 3]> = raw.iter().map(|c| [c[0], c[1], c[2]]).collect();
            let e = formula(6, &clauses);
            if embed_planar(&e).is_some() {
                equisatisfiable(&e);
            }
        }
    }
}
