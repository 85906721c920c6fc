//! Combinatorial embeddings of simple graphs.
//!
//! Embeddings are rotation systems: for every vertex, the cyclic order of its
//! neighbours. Faces are recovered by the usual tracing rule (arrive at `v`
//! from `u`, leave towards the successor of `u` in the rotation at `v`).
//! Planarity testing uses path addition over biconnected blocks: repeatedly
//! pick a fragment with the fewest admissible faces and route a path through
//! it, splitting the face.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

/// Simple undirected graph on vertices `0..n`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<BTreeSet<usize>>,
}

impl Graph {
    pub fn new(n: usize) -> Graph {
        Graph {
            adj: vec![BTreeSet::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Graph {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn add_vertex(&mut self) -> usize {
        self.adj.push(BTreeSet::new());
        self.adj.len() - 1
    }

    /// Adds an edge; loops and parallel edges are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u != v {
            self.adj[u].insert(v);
            self.adj[v].insert(u);
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().copied()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, a) in self.adj.iter().enumerate() {
            for &v in a {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Connected components, each sorted, in order of least vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.adj.len()];
        let mut out = Vec::new();
        for s in 0..self.adj.len() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                for &n in &self.adj[comp[i]] {
                    if !seen[n] {
                        seen[n] = true;
                        comp.push(n);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// A directed edge.
pub type Dart = (usize, usize);

/// Cyclic neighbour order at every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationSystem {
    pub rotation: Vec<Vec<usize>>,
}

impl RotationSystem {
    fn successor(&self, v: usize, u: usize) -> usize {
        let rot = &self.rotation[v];
        let i = rot.iter().position(|&x| x == u).expect("dart in rotation");
        rot[(i + 1) % rot.len()]
    }

    /// Traces all faces. Faces are listed by their darts, starting from the
    /// least unvisited dart in (u, v) order.
    pub fn faces(&self) -> Vec<Vec<Dart>> {
        let mut darts: Vec<Dart> = Vec::new();
        for (u, rot) in self.rotation.iter().enumerate() {
            for &v in rot {
                darts.push((u, v));
            }
        }
        darts.sort_unstable();
        let mut seen: HashSet<Dart> = HashSet::new();
        let mut faces = Vec::new();
        for &d in &darts {
            if seen.contains(&d) {
                continue;
            }
            let mut face = Vec::new();
            let mut cur = d;
            while seen.insert(cur) {
                face.push(cur);
                let (u, v) = cur;
                cur = (v, self.successor(v, u));
            }
            faces.push(face);
        }
        faces
    }

    /// Checks that the rotation matches the graph's adjacency exactly.
    pub fn is_consistent_with(&self, g: &Graph) -> bool {
        self.rotation.len() == g.num_vertices()
            && self.rotation.iter().enumerate().all(|(v, rot)| {
                let set: BTreeSet<usize> = rot.iter().copied().collect();
                set.len() == rot.len() && set == g.adj[v]
            })
    }

    /// Euler characteristic test: V - E + F = 2 for every connected
    /// component (an isolated vertex bounds one face).
    pub fn is_planar_embedding(&self, g: &Graph) -> bool {
        if !self.is_consistent_with(g) {
            return false;
        }
        let faces = self.faces();
        let mut face_count: HashMap<usize, i64> = HashMap::new();
        let comps = g.components();
        let mut comp_of = vec![0; g.num_vertices()];
        for (i, c) in comps.iter().enumerate() {
            for &v in c {
                comp_of[v] = i;
            }
        }
        for f in &faces {
            *face_count.entry(comp_of[f[0].0]).or_default() += 1;
        }
        comps.iter().enumerate().all(|(i, c)| {
            let v = c.len() as i64;
            let e = c.iter().map(|&x| g.degree(x)).sum::<usize>() as i64 / 2;
            let f = if e == 0 {
                1
            } else {
                face_count.get(&i).copied().unwrap_or(0)
            };
            v - e + f == 2
        })
    }
}

/// Faces that share an edge, as an adjacency list over face indices.
/// A face adjacent to itself (across a bridge) is not listed.
pub fn dual_adjacency(faces: &[Vec<Dart>]) -> Vec<BTreeSet<usize>> {
    let mut face_of: HashMap<Dart, usize> = HashMap::new();
    for (i, f) in faces.iter().enumerate() {
        for &d in f {
            face_of.insert(d, i);
        }
    }
    let mut adj = vec![BTreeSet::new(); faces.len()];
    for (i, f) in faces.iter().enumerate() {
        for &(u, v) in f {
            if let Some(&j) = face_of.get(&(v, u)) {
                if j != i {
                    adj[i].insert(j);
                }
            }
        }
    }
    adj
}

/// Why a graph was rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonPlanar {
    /// Attachment vertices of a fragment that fits in no face.
    pub fragment_attachments: Vec<usize>,
}

/// Finds a planar rotation system, or reports a fragment that cannot be
/// placed.
pub fn planar_embedding(g: &Graph) -> Result<RotationSystem, NonPlanar> {
    let n = g.num_vertices();
    let mut rotation: Vec<Vec<usize>> = vec![Vec::new(); n];
    for block in biconnected_blocks(g) {
        let rot = embed_block(g, &block)?;
        for (v, order) in rot {
            rotation[v].extend(order);
        }
    }
    Ok(RotationSystem { rotation })
}

/// Edge sets of the biconnected blocks (bridges form single-edge blocks).
fn biconnected_blocks(g: &Graph) -> Vec<Vec<(usize, usize)>> {
    let n = g.num_vertices();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut time = 0;
    let mut blocks = Vec::new();
    let mut edge_stack: Vec<(usize, usize)> = Vec::new();
    let adj: Vec<Vec<usize>> = (0..n).map(|v| g.neighbors(v).collect()).collect();
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        // frame: (vertex, parent, next neighbour index)
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        while let Some(&mut (v, parent, ref mut i)) = stack.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if disc[w] == usize::MAX {
                    edge_stack.push((v, w));
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, v, 0));
                } else if w != parent && disc[w] < disc[v] {
                    edge_stack.push((v, w));
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[v]);
                    if low[v] >= disc[p] {
                        let mut block = Vec::new();
                        while let Some(e) = edge_stack.pop() {
                            block.push(e);
                            if e == (p, v) {
                                break;
                            }
                        }
                        blocks.push(block);
                    }
                }
            }
        }
    }
    blocks
}

/// Embeds one biconnected block; returns the rotation at each of its vertices.
fn embed_block(g: &Graph, edges: &[(usize, usize)]) -> Result<BTreeMap<usize, Vec<usize>>, NonPlanar> {
    let mut badj: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for &(u, v) in edges {
        badj.entry(u).or_default().insert(v);
        badj.entry(v).or_default().insert(u);
    }
    let _ = g;
    if edges.len() == 1 {
        let (u, v) = edges[0];
        return Ok(BTreeMap::from([(u, vec![v]), (v, vec![u])]));
    }
    let cycle = find_cycle(&badj);
    let mut in_h: BTreeSet<usize> = cycle.iter().copied().collect();
    let mut h_edges: HashSet<(usize, usize)> = HashSet::new();
    for i in 0..cycle.len() {
        let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
        h_edges.insert((a.min(b), a.max(b)));
    }
    let mut faces: Vec<Vec<usize>> = vec![cycle.clone(), cycle.iter().rev().copied().collect()];
    while h_edges.len() < edges.len() {
        let fragments = find_fragments(&badj, &in_h, &h_edges);
        let mut best: Option<(usize, Vec<usize>)> = None;
        for (fi, frag) in fragments.iter().enumerate() {
            let admissible: Vec<usize> = faces
                .iter()
                .enumerate()
                .filter(|(_, f)| frag.attachments.iter().all(|a| f.contains(a)))
                .map(|(i, _)| i)
                .collect();
            if admissible.is_empty() {
                return Err(NonPlanar {
                    fragment_attachments: frag.attachments.iter().copied().collect(),
                });
            }
            if best.as_ref().is_none_or(|(_, b)| admissible.len() < b.len()) {
                let done = admissible.len() == 1;
                best = Some((fi, admissible));
                if done {
                    break;
                }
            }
        }
        let (fi, admissible) = best.expect("a fragment remains while edges remain");
        let path = fragment_path(&badj, &in_h, &fragments[fi]);
        let face_idx = admissible[0];
        let face = faces.swap_remove(face_idx);
        let (f1, f2) = split_face(&face, &path);
        faces.push(f1);
        faces.push(f2);
        for w in path.windows(2) {
            h_edges.insert((w[0].min(w[1]), w[0].max(w[1])));
        }
        in_h.extend(path.iter().copied());
    }
    // rotation successor from oriented faces: u -> v -> w gives succ_v(u) = w
    let mut succ: BTreeMap<usize, HashMap<usize, usize>> = BTreeMap::new();
    for f in &faces {
        let k = f.len();
        for i in 0..k {
            let (u, v, w) = (f[i], f[(i + 1) % k], f[(i + 2) % k]);
            succ.entry(v).or_default().insert(u, w);
        }
    }
    let mut out = BTreeMap::new();
    for (v, s) in succ {
        let start = *s.keys().min().expect("vertex has neighbours");
        let mut order = vec![start];
        let mut cur = s[&start];
        while cur != start {
            order.push(cur);
            cur = s[&cur];
        }
        debug_assert_eq!(order.len(), badj[&v].len());
        out.insert(v, order);
    }
    Ok(out)
}

fn find_cycle(adj: &BTreeMap<usize, BTreeSet<usize>>) -> Vec<usize> {
    // DFS until a back edge closes a cycle
    let start = *adj.keys().next().expect("nonempty block");
    let mut parent: HashMap<usize, usize> = HashMap::new();
    let mut depth: HashMap<usize, usize> = HashMap::new();
    let mut stack = vec![(start, usize::MAX)];
    while let Some((v, p)) = stack.pop() {
        if depth.contains_key(&v) {
            continue;
        }
        depth.insert(v, if p == usize::MAX { 0 } else { depth[&p] + 1 });
        parent.insert(v, p);
        for &w in &adj[&v] {
            if w == p {
                continue;
            }
            if let Some(&dw) = depth.get(&w) {
                if dw < depth[&v] {
                    let mut cyc = vec![v];
                    let mut x = v;
                    while x != w {
                        x = parent[&x];
                        cyc.push(x);
                    }
                    return cyc;
                }
            } else {
                stack.push((w, v));
            }
        }
    }
    unreachable!("a biconnected block with two or more edges has a cycle")
}

struct Fragment {
    attachments: BTreeSet<usize>,
    /// Interior vertices (empty for a chord).
    interior: BTreeSet<usize>,
    chord: Option<(usize, usize)>,
}

fn find_fragments(
    adj: &BTreeMap<usize, BTreeSet<usize>>,
    in_h: &BTreeSet<usize>,
    h_edges: &HashSet<(usize, usize)>,
) -> Vec<Fragment> {
    let mut out = Vec::new();
    for (&u, nb) in adj {
        if !in_h.contains(&u) {
            continue;
        }
        for &v in nb {
            if u < v && in_h.contains(&v) && !h_edges.contains(&(u, v)) {
                out.push(Fragment {
                    attachments: BTreeSet::from([u, v]),
                    interior: BTreeSet::new(),
                    chord: Some((u, v)),
                });
            }
        }
    }
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    for &s in adj.keys() {
        if in_h.contains(&s) || seen.contains(&s) {
            continue;
        }
        let mut interior = BTreeSet::from([s]);
        let mut attachments = BTreeSet::new();
        let mut queue = VecDeque::from([s]);
        seen.insert(s);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[&x] {
                if in_h.contains(&y) {
                    attachments.insert(y);
                } else if seen.insert(y) {
                    interior.insert(y);
                    queue.push_back(y);
                }
            }
        }
        out.push(Fragment {
            attachments,
            interior,
            chord: None,
        });
    }
    out
}

/// A path through the fragment joining two distinct attachments.
fn fragment_path(
    adj: &BTreeMap<usize, BTreeSet<usize>>,
    in_h: &BTreeSet<usize>,
    frag: &Fragment,
) -> Vec<usize> {
    if let Some((u, v)) = frag.chord {
        return vec![u, v];
    }
    let start = *frag.attachments.iter().next().expect("attachments");
    let mut prev: HashMap<usize, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    for &y in &adj[&start] {
        if frag.interior.contains(&y) && !prev.contains_key(&y) {
            prev.insert(y, start);
            queue.push_back(y);
        }
    }
    while let Some(x) = queue.pop_front() {
        for &y in &adj[&x] {
            if in_h.contains(&y) && y != start {
                let mut path = vec![y, x];
                let mut cur = x;
                while let Some(&p) = prev.get(&cur) {
                    path.push(p);
                    if p == start {
                        break;
                    }
                    cur = p;
                }
                path.reverse();
                return path;
            }
            if frag.interior.contains(&y) && !prev.contains_key(&y) {
                prev.insert(y, x);
                queue.push_back(y);
            }
        }
    }
    unreachable!("fragments of a biconnected block have two attachments")
}

fn split_face(face: &[usize], path: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let u = path[0];
    let w = *path.last().expect("path");
    let k = face.len();
    let i = face.iter().position(|&x| x == u).expect("u on face");
    let j = face.iter().position(|&x| x == w).expect("w on face");
    let interior = &path[1..path.len() - 1];
    let mut f1 = Vec::new();
    let mut x = i;
    loop {
        f1.push(face[x]);
        if x == j {
            break;
        }
        x = (x + 1) % k;
    }
    f1.extend(interior.iter().rev());
    let mut f2 = Vec::new();
    let mut x = j;
    loop {
        f2.push(face[x]);
        if x == i {
            break;
        }
        x = (x + 1) % k;
    }
    f2.extend(interior.iter());
    (f1, f2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    fn k33() -> Graph {
        let mut g = Graph::new(6);
        for u in 0..3 {
            for v in 3..6 {
                g.add_edge(u, v);
            }
        }
        g
    }

    fn check(g: &Graph) -> RotationSystem {
        let r = planar_embedding(g).expect("planar");
        assert!(r.is_planar_embedding(g));
        // every edge is traversed exactly twice
        let faces = r.faces();
        let total: usize = faces.iter().map(|f| f.len()).sum();
        assert_eq!(total, 2 * g.num_edges());
        r
    }

    #[test]
    fn kuratowski_graphs_are_rejected() {
        assert!(planar_embedding(&complete(5)).is_err());
        assert!(planar_embedding(&k33()).is_err());
    }

    #[test]
    fn planar_graphs_embed() {
        let r = check(&complete(4));
        assert_eq!(r.faces().len(), 4);
        let cube = Graph::from_edges(
            8,
            &[
                (0, 1), (1, 2), (2, 3), (3, 0),
                (4, 5), (5, 6), (6, 7), (7, 4),
                (0, 4), (1, 5), (2, 6), (3, 7),
            ],
        );
        assert_eq!(check(&cube).faces().len(), 6);
        // star: a tree has one face
        let star = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(check(&star).faces().len(), 1);
        // two triangles sharing a cut vertex, plus an isolated vertex
        let bowtie = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]);
        assert_eq!(check(&bowtie).faces().len(), 3);
    }

    #[test]
    fn k5_minus_edge_and_wheels() {
        let mut g = Graph::new(5);
        for u in 0..5 {
            for v in u + 1..5 {
                if (u, v) != (0, 1) {
                    g.add_edge(u, v);
                }
            }
        }
        check(&g);
        let mut wheel = Graph::new(9);
        for i in 1..9 {
            wheel.add_edge(0, i);
            wheel.add_edge(i, if i == 8 { 1 } else { i + 1 });
        }
        assert_eq!(check(&wheel).faces().len(), 9);
    }

    #[test]
    fn petersen_is_not_planar() {
        let mut g = Graph::new(10);
        for i in 0..5 {
            g.add_edge(i, (i + 1) % 5);
            g.add_edge(i, i + 5);
            g.add_edge(5 + i, 5 + (i + 2) % 5);
        }
        assert!(planar_embedding(&g).is_err());
    }

    #[test]
    fn dual_of_cube() {
        let cube = Graph::from_edges(
            8,
            &[
                (0, 1), (1, 2), (2, 3), (3, 0),
                (4, 5), (5, 6), (6, 7), (7, 4),
                (0, 4), (1, 5), (2, 6), (3, 7),
            ],
        );
        let r = check(&cube);
        let dual = dual_adjacency(&r.faces());
        assert!(dual.iter().all(|a| a.len() == 4));
    }
}
