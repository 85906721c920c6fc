//! Placement and routing of gadget netlists.
//!
//! Square-lattice netlists get a crossing-free straight-line drawing on a
//! coarse grid (found by seeded annealing), each gadget is turned to face its
//! neighbours, the grid is scaled up and wires are routed one by one. Cubic
//! netlists are placed in a row and routed through the third dimension.

use std::collections::{BTreeMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lattice::Cell;

use super::gadget::GadgetGeometry;
use super::port::Port;
use super::route::{route_wire, RouteLimits};

/// A gadget instance waiting to be placed.
#[derive(Clone, Debug)]
pub struct NodeSpec {
    pub label: String,
    pub gadget: GadgetGeometry,
    /// Groups of ports that may be exchanged without changing behaviour.
    pub swappable: Vec<Vec<&'static str>>,
}

/// A wire between two ports, named by node index and port name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSpec {
    pub from: (usize, String),
    pub to: (usize, String),
}

#[derive(Clone, Debug, Default)]
pub struct Netlist {
    pub nodes: Vec<NodeSpec>,
    pub edges: Vec<EdgeSpec>,
    /// Dead-end extensions forcing a value on a port: (node, port, value).
    pub forced: Vec<(usize, String, bool)>,
}

impl Netlist {
    pub fn add(&mut self, label: impl Into<String>, gadget: GadgetGeometry, swappable: Vec<Vec<&'static str>>) -> usize {
        self.nodes.push(NodeSpec {
            label: label.into(),
            gadget,
            swappable,
        });
        self.nodes.len() - 1
    }

    pub fn connect(&mut self, from: (usize, &str), to: (usize, &str)) {
        self.edges.push(EdgeSpec {
            from: (from.0, from.1.to_string()),
            to: (to.0, to.1.to_string()),
        });
    }
}

/// Result of placing and routing a netlist.
#[derive(Clone, Debug)]
pub struct Layout {
    /// Gadgets after rotation and translation, in node order.
    pub placed: Vec<GadgetGeometry>,
    /// Translation and symmetry index applied to each node.
    pub transforms: Vec<(Cell, usize)>,
    /// Routed cells of each edge (stubs excluded), in edge order.
    pub wires: Vec<Vec<Cell>>,
    /// Cells added by forcing extensions.
    pub extensions: Vec<Vec<Cell>>,
}

impl Layout {
    pub fn cells(&self) -> Vec<Cell> {
        let mut out: Vec<Cell> = self.placed.iter().flat_map(|g| g.region.iter().copied()).collect();
        out.extend(self.wires.iter().flatten().copied());
        out.extend(self.extensions.iter().flatten().copied());
        out
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LayoutParams {
    pub seed: u64,
    pub min_scale: i32,
    pub max_scale: i32,
    pub attempts: usize,
}

impl Default for LayoutParams {
    fn default() -> Self {
        LayoutParams {
            seed: 0x711e,
            min_scale: 14,
            max_scale: 40,
            attempts: 6,
        }
    }
}

/// The eight symmetries of the square lattice, as linear maps.
pub fn square_symmetry(k: usize, c: Cell) -> Cell {
    let (x, y) = (c.x(), c.y());
    let (x, y) = if k & 4 != 0 { (y, x) } else { (x, y) };
    let (x, y) = match k & 3 {
        0 => (x, y),
        1 => (-y, x),
        2 => (-x, -y),
        _ => (y, -x),
    };
    Cell::xy(x, y)
}

fn centroid(g: &GadgetGeometry) -> (f64, f64, f64) {
    let n = g.region.len().max(1) as f64;
    let mut s = [0.0; 3];
    for c in g.region.iter() {
        for (k, &x) in c.coords().iter().take(3).enumerate() {
            s[k] += x as f64;
        }
    }
    (s[0] / n, s[1] / n, s[2] / n)
}

fn rename_ports(g: &GadgetGeometry, perm: &BTreeMap<String, String>) -> GadgetGeometry {
    let mut out = g.clone();
    for p in &mut out.ports {
        if let Some(n) = perm.get(&p.name) {
            p.name = n.clone();
        }
    }
    out
}

/// All renamings that permute names within each swappable group.
fn renamings(groups: &[Vec<&'static str>]) -> Vec<BTreeMap<String, String>> {
    let mut out = vec![BTreeMap::new()];
    for group in groups {
        let mut next = Vec::new();
        for perm in permutations(group.len()) {
            for base in &out {
                let mut m = base.clone();
                for (i, &j) in perm.iter().enumerate() {
                    m.insert(group[i].to_string(), group[j].to_string());
                }
                next.push(m);
            }
        }
        out = next;
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn on_segment(p: (i64, i64), a: (i64, i64), b: (i64, i64)) -> bool {
    cross(a, b, p) == 0 && p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
}

fn segments_meet(a: (i64, i64), b: (i64, i64), c: (i64, i64), d: (i64, i64)) -> bool {
    let d1 = cross(c, d, a).signum();
    let d2 = cross(c, d, b).signum();
    let d3 = cross(a, b, c).signum();
    let d4 = cross(a, b, d).signum();
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    (d1 == 0 && on_segment(a, c, d))
        || (d2 == 0 && on_segment(b, c, d))
        || (d3 == 0 && on_segment(c, a, b))
        || (d4 == 0 && on_segment(d, a, b))
}

fn point_segment_distance(p: (i64, i64), a: (i64, i64), b: (i64, i64)) -> f64 {
    let (px, py) = (p.0 as f64, p.1 as f64);
    let (ax, ay) = (a.0 as f64, a.1 as f64);
    let (bx, by) = (b.0 as f64, b.1 as f64);
    let (dx, dy) = (bx - ax, by - ay);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((px - ax) * dx + (py - ay) * dy) / len2).clamp(0.0, 1.0)
    };
    ((px - ax - t * dx).powi(2) + (py - ay - t * dy).powi(2)).sqrt()
}

/// Crossings between edges that share no endpoint, plus overlaps between
/// edges that do, plus nodes lying too close to foreign edges.
fn conflicts(pos: &[(i64, i64)], edges: &[(usize, usize)]) -> usize {
    let mut bad = 0;
    for (i, &(a, b)) in edges.iter().enumerate() {
        for &(c, d) in &edges[i + 1..] {
            let shared = [a, b].iter().filter(|x| **x == c || **x == d).count();
            if shared == 0 {
                if segments_meet(pos[a], pos[b], pos[c], pos[d]) {
                    bad += 1;
                }
            } else if shared == 1 {
                // collinear overlap of two edges leaving the same node
                let (s, x, y) = if a == c {
                    (a, b, d)
                } else if a == d {
                    (a, b, c)
                } else if b == c {
                    (b, a, d)
                } else {
                    (b, a, c)
                };
                let (u, v) = (pos[x], pos[y]);
                let o = pos[s];
                if cross(o, u, v) == 0 && (u.0 - o.0) * (v.0 - o.0) + (u.1 - o.1) * (v.1 - o.1) > 0 {
                    bad += 1;
                }
            }
        }
        for (v, &p) in pos.iter().enumerate() {
            if v != a && v != b && point_segment_distance(p, pos[a], pos[b]) < 0.7 {
                bad += 1;
            }
        }
    }
    bad
}

fn energy(pos: &[(i64, i64)], edges: &[(usize, usize)]) -> f64 {
    let len: f64 = edges
        .iter()
        .map(|&(a, b)| {
            let (dx, dy) = ((pos[a].0 - pos[b].0) as f64, (pos[a].1 - pos[b].1) as f64);
            dx * dx + dy * dy
        })
        .sum();
    1000.0 * conflicts(pos, edges) as f64 + len
}

/// A straight-line drawing with distinct integer vertex positions and no
/// crossings, or `None` if annealing fails.
pub fn planar_drawing(n: usize, edges: &[(usize, usize)], rng: &mut ChaCha8Rng) -> Option<Vec<(i64, i64)>> {
    if n == 0 {
        return Some(Vec::new());
    }
    let side = (2.0 * (n as f64).sqrt()).ceil() as i64 + 1;
    let mut occupied = HashSet::new();
    let mut pos = Vec::with_capacity(n);
    for _ in 0..n {
        loop {
            let p = (rng.gen_range(0..side), rng.gen_range(0..side));
            if occupied.insert(p) {
                pos.push(p);
                break;
            }
        }
    }
    let mut e = energy(&pos, edges);
    let steps = 4000 * n;
    for step in 0..steps {
        let t = 50.0 * (0.001f64).powf(step as f64 / steps as f64);
        let v = rng.gen_range(0..n);
        let p = (rng.gen_range(0..side), rng.gen_range(0..side));
        if occupied.contains(&p) {
            continue;
        }
        let old = pos[v];
        pos[v] = p;
        let e2 = energy(&pos, edges);
        if e2 <= e || rng.gen::<f64>() < ((e - e2) / t).exp() {
            occupied.remove(&old);
            occupied.insert(p);
            e = e2;
        } else {
            pos[v] = old;
        }
        if e < 1000.0 && step > steps / 2 && conflicts(&pos, edges) == 0 {
            break;
        }
    }
    (conflicts(&pos, edges) == 0).then_some(pos)
}

/// Chooses the symmetry and port renaming of each node that best aligns its
/// ports with the directions of its wires.
fn orient(net: &Netlist, pos: &[(i64, i64)]) -> Vec<(usize, BTreeMap<String, String>)> {
    let mut out = Vec::new();
    for (v, node) in net.nodes.iter().enumerate() {
        let (cx, cy, _) = centroid(&node.gadget);
        let mut targets: Vec<(String, (f64, f64))> = Vec::new();
        for e in &net.edges {
            for (mine, other) in [(&e.from, &e.to), (&e.to, &e.from)] {
                if mine.0 == v && other.0 != v {
                    let d = ((pos[other.0].0 - pos[v].0) as f64, (pos[other.0].1 - pos[v].1) as f64);
                    targets.push((mine.1.clone(), d));
                }
            }
        }
        let mut best: Option<(f64, usize, BTreeMap<String, String>)> = None;
        for k in 0..8 {
            for perm in renamings(&node.swappable) {
                let mut cost = 0.0;
                for (name, d) in &targets {
                    // the port currently called `name` after renaming
                    let actual = perm
                        .iter()
                        .find(|(_, to)| *to == name)
                        .map(|(from, _)| from.as_str())
                        .unwrap_or(name);
                    let p = node.gadget.port(actual).expect("port of node");
                    let tip = p.cell(p.stub_len - 1);
                    let w = square_symmetry(k, Cell::xy((tip.x() as f64 - cx).round() as i32, (tip.y() as f64 - cy).round() as i32));
                    let (wx, wy) = (w.x() as f64, w.y() as f64);
                    let dot = (wx * d.0 + wy * d.1) / ((wx.hypot(wy) * d.0.hypot(d.1)).max(1e-9));
                    cost += dot.clamp(-1.0, 1.0).acos();
                }
                if best.as_ref().is_none_or(|b| cost < b.0 - 1e-9) {
                    best = Some((cost, k, perm));
                }
            }
        }
        let (_, k, perm) = best.expect("at least one orientation");
        out.push((k, perm));
    }
    out
}

fn route_all(net: &Netlist, placed: Vec<GadgetGeometry>, transforms: Vec<(Cell, usize)>, margin: i32) -> Option<Layout> {
    let mut blocked: HashSet<Cell> = HashSet::new();
    for g in &placed {
        // gadgets must keep a free cell between them
        if g.region
            .iter()
            .any(|c| blocked.contains(c) || c.neighbors().any(|n| blocked.contains(&n)))
        {
            return None;
        }
        blocked.extend(g.region.iter().copied());
    }
    let port = |(v, name): &(usize, String)| -> Port { placed[*v].port(name).expect("netlist port").clone() };
    let mut extensions = Vec::new();
    for (v, name, value) in &net.forced {
        let p = port(&(*v, name.clone()));
        let path = p.forcing_stub(*value, p.stub_len);
        let ext: Vec<Cell> = path[p.stub_len..].to_vec();
        for (i, &c) in ext.iter().enumerate() {
            let prev = if i == 0 { path[p.stub_len - 1] } else { ext[i - 1] };
            if blocked.contains(&c) || c.neighbors().any(|n| n != prev && blocked.contains(&n)) {
                return None;
            }
        }
        blocked.extend(ext.iter().copied());
        extensions.push(ext);
    }
    let mut order: Vec<usize> = (0..net.edges.len()).collect();
    let dist = |e: &EdgeSpec| port(&e.from).start.manhattan(port(&e.to).start);
    order.sort_by_key(|&i| (dist(&net.edges[i]), i));
    // keep the exits of ports that are still waiting for a wire clear
    let exit = |p: &Port| -> Vec<Cell> { p.path(p.stub_len + 2)[p.stub_len..].to_vec() };
    let mut wires = vec![Vec::new(); net.edges.len()];
    for (k, &i) in order.iter().enumerate() {
        let e = &net.edges[i];
        let limits = RouteLimits {
            margin,
            ..RouteLimits::default()
        };
        let mut avoid = blocked.clone();
        for &j in &order[k + 1..] {
            for end in [&net.edges[j].from, &net.edges[j].to] {
                if *end != e.from && *end != e.to {
                    avoid.extend(exit(&port(end)));
                }
            }
        }
        let path = route_wire(&port(&e.from), &port(&e.to), &avoid, limits).ok()?;
        blocked.extend(path.iter().copied());
        wires[i] = path;
    }
    Some(Layout {
        placed,
        transforms,
        wires,
        extensions,
    })
}

/// Places and routes a square-lattice netlist.
pub fn layout_2d(net: &Netlist, params: LayoutParams) -> Option<Layout> {
    let edges: Vec<(usize, usize)> = net
        .edges
        .iter()
        .filter(|e| e.from.0 != e.to.0)
        .map(|e| (e.from.0, e.to.0))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    for _ in 0..params.attempts {
        let Some(pos) = planar_drawing(net.nodes.len(), &edges, &mut rng) else {
            continue;
        };
        let orientation = orient(net, &pos);
        let mut net2 = net.clone();
        let oriented: Vec<GadgetGeometry> = net
            .nodes
            .iter()
            .zip(&orientation)
            .map(|(node, (k, perm))| {
                let k = *k;
                rename_ports(&node.gadget, perm).transform(|c| square_symmetry(k, c), |c| square_symmetry(k, c))
            })
            .collect();
        for (v, node) in net2.nodes.iter_mut().enumerate() {
            node.gadget = oriented[v].clone();
        }
        let mut scale = params.min_scale;
        while scale <= params.max_scale {
            let mut placed = Vec::new();
            let mut transforms = Vec::new();
            for (v, g) in oriented.iter().enumerate() {
                let (cx, cy, _) = centroid(g);
                let shift = Cell::xy(
                    pos[v].0 as i32 * scale - cx.round() as i32,
                    pos[v].1 as i32 * scale - cy.round() as i32,
                );
                placed.push(g.translate(shift));
                transforms.push((shift, orientation[v].0));
            }
            if let Some(layout) = route_all(&net2, placed, transforms, scale) {
                return Some(layout);
            }
            scale += 6;
        }
    }
    None
}

/// Places a cubic-lattice netlist in a row along the first axis and routes
/// through the surrounding space. Translations are even so that every
/// gadget keeps the cell parities it was designed with.
pub fn layout_3d(net: &Netlist, params: LayoutParams) -> Option<Layout> {
    let mut scale = params.min_scale + params.min_scale % 2;
    while scale <= params.max_scale {
        let mut placed = Vec::new();
        let mut transforms = Vec::new();
        for (v, node) in net.nodes.iter().enumerate() {
            let shift = Cell::xyz(scale * v as i32, 0, 0);
            placed.push(node.gadget.translate(shift));
            transforms.push((shift, 0));
        }
        if let Some(layout) = route_all(net, placed, transforms, scale / 2) {
            return Some(layout);
        }
        scale += 6;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetries_form_the_square_group() {
        let c = Cell::xy(2, 1);
        let images: HashSet<Cell> = (0..8).map(|k| square_symmetry(k, c)).collect();
        assert_eq!(images.len(), 8);
        for k in 0..8 {
            let a = square_symmetry(k, Cell::xy(1, 0));
            let b = square_symmetry(k, Cell::xy(0, 1));
            assert_eq!(a.x() * b.x() + a.y() * b.y(), 0);
        }
    }

    #[test]
    fn drawings_of_planar_graphs_have_no_crossings() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // cube graph and K4
        let cube = [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (1, 5), (2, 6), (3, 7)];
        let pos = planar_drawing(8, &cube, &mut rng).expect("cube is planar");
        assert_eq!(conflicts(&pos, &cube), 0);
        let k4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        assert!(planar_drawing(4, &k4, &mut rng).is_some());
    }

    #[test]
    fn crossing_segments_are_detected() {
        assert!(segments_meet((0, 0), (2, 2), (0, 2), (2, 0)));
        assert!(!segments_meet((0, 0), (1, 0), (0, 1), (1, 1)));
        assert!(segments_meet((0, 0), (2, 0), (1, 0), (3, 0)));
    }

    #[test]
    fn renamings_cover_each_group() {
        assert_eq!(renamings(&[vec!["a", "b"], vec!["x", "y", "z"]]).len(), 12);
    }
}
