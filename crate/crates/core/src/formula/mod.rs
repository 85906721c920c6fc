//! Monotone 1-in-3 SAT instances and Boolean circuits.

pub mod planar;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use planar::{dual_adjacency, planar_embedding, Dart, Graph, RotationSystem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("variable {0} out of range")]
    VariableRange(usize),
    #[error("clause {0:?} repeats a variable")]
    RepeatedVariable([usize; 3]),
    #[error("assignment has {found} values, expected {expected}")]
    Arity { expected: usize, found: usize },
    #[error("{0} variables exceed the brute-force cap")]
    TooManyVariables(usize),
    #[error("search budget of {0} nodes exceeded")]
    BudgetExceeded(u64),
    #[error("embedding does not match the incidence graph or is not planar")]
    BadEmbedding,
}

pub type Result<T, E = FormulaError> = std::result::Result<T, E>;

/// Monotone 1-in-3 instance. Variables are numbered from 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula1in3 {
    pub num_vars: usize,
    pub clauses: Vec<[usize; 3]>,
    /// Optional rotation system of the incidence graph.
    pub embedding: Option<RotationSystem>,
}

impl Formula1in3 {
    pub fn new(num_vars: usize, clauses: Vec<[usize; 3]>) -> Result<Formula1in3> {
        for c in &clauses {
            for &v in c {
                if v == 0 || v > num_vars {
                    return Err(FormulaError::VariableRange(v));
                }
            }
            if c[0] == c[1] || c[0] == c[2] || c[1] == c[2] {
                return Err(FormulaError::RepeatedVariable(*c));
            }
        }
        Ok(Formula1in3 {
            num_vars,
            clauses,
            embedding: None,
        })
    }

    /// Incidence graph: vertex `v - 1` for variable `v`, `num_vars + j` for
    /// clause `j`.
    pub fn incidence_graph(&self) -> Graph {
        let n = self.num_vars;
        let mut g = Graph::new(n + self.clauses.len());
        for (j, c) in self.clauses.iter().enumerate() {
            for &v in c {
                g.add_edge(v - 1, n + j);
            }
        }
        g
    }

    pub fn vertex_name(&self, vertex: usize) -> String {
        if vertex < self.num_vars {
            format!("v{}", vertex + 1)
        } else {
            format!("k{}", vertex - self.num_vars + 1)
        }
    }

    fn vertex_of(&self, name: &str) -> Option<usize> {
        let (kind, num) = name.split_at(1.min(name.len()));
        let k: usize = num.parse().ok()?;
        match kind {
            "v" if k >= 1 && k <= self.num_vars => Some(k - 1),
            "k" if k >= 1 && k <= self.clauses.len() => Some(self.num_vars + k - 1),
            _ => None,
        }
    }
}

/// Satisfied iff every clause has exactly one true variable.
pub fn eval_1in3(f: &Formula1in3, a: &[bool]) -> Result<bool> {
    if a.len() != f.num_vars {
        return Err(FormulaError::Arity {
            expected: f.num_vars,
            found: a.len(),
        });
    }
    Ok(f
        .clauses
        .iter()
        .all(|c| c.iter().filter(|&&v| a[v - 1]).count() == 1))
}

pub const BRUTE_FORCE_CAP: usize = 25;

/// Every satisfying assignment, by exhaustive enumeration, in lexicographic
/// order.
pub fn brute_force_models(f: &Formula1in3) -> Result<Vec<Vec<bool>>> {
    let n = f.num_vars;
    if n > BRUTE_FORCE_CAP {
        return Err(FormulaError::TooManyVariables(n));
    }
    let masks: Vec<u32> = f
        .clauses
        .iter()
        .map(|c| c.iter().fold(0u32, |m, &v| m | 1 << (v - 1)))
        .collect();
    let mut out = Vec::new();
    for bits in 0u32..(1u32 << n) {
        if masks.iter().all(|&m| (bits & m).count_ones() == 1) {
            out.push((0..n).map(|i| bits >> i & 1 == 1).collect());
        }
    }
    out.sort();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMode {
    Decide,
    Count,
    EnumerateAll,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOutcome {
    pub satisfiable: bool,
    /// Exact model count (decide mode stops at the first model and reports 1).
    pub count: BigUint,
    /// Every model in enumerate mode; the model found in decide mode.
    pub models: Vec<Vec<bool>>,
    pub nodes: u64,
}

struct Search<'a> {
    f: &'a Formula1in3,
    occ: Vec<Vec<usize>>,
    value: Vec<Option<bool>>,
    n_true: Vec<u8>,
    n_false: Vec<u8>,
    trail: Vec<usize>,
    mode: SolveMode,
    count: BigUint,
    models: Vec<Vec<bool>>,
    nodes: u64,
    max_nodes: Option<u64>,
    done: bool,
    cache: HashMap<Vec<u64>, BigUint>,
    mark: Vec<u32>,
    generation: u32,
    /// XOR over open clauses of a per-(clause, free mask) key.
    hash: u128,
    failed: HashSet<u128>,
}

fn mix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn clause_key(c: usize, mask: u64) -> u128 {
    let x = (c as u64) << 3 | mask;
    (mix(x) as u128) << 64 | mix(x ^ 0x5bd1_e995_0000_0000) as u128
}

impl<'a> Search<'a> {
    fn free_mask(&self, c: usize) -> u64 {
        self.f.clauses[c]
            .iter()
            .enumerate()
            .fold(0u64, |m, (i, &u)| m | (self.value[u - 1].is_none() as u64) << i)
    }

    fn toggle(&mut self, c: usize) {
        if self.n_true[c] == 0 {
            self.hash ^= clause_key(c, self.free_mask(c));
        }
    }

    fn assign(&mut self, v: usize, b: bool) -> bool {
        for i in 0..self.occ[v].len() {
            self.toggle(self.occ[v][i]);
        }
        self.value[v] = Some(b);
        self.trail.push(v);
        let mut ok = true;
        for i in 0..self.occ[v].len() {
            let c = self.occ[v][i];
            if b {
                self.n_true[c] += 1;
                if self.n_true[c] > 1 {
                    ok = false;
                }
            } else {
                self.n_false[c] += 1;
                if self.n_false[c] == 3 {
                    ok = false;
                }
            }
            self.toggle(c);
        }
        ok
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().expect("trail");
            for i in 0..self.occ[v].len() {
                self.toggle(self.occ[v][i]);
            }
            let b = self.value[v].take().expect("assigned");
            for i in 0..self.occ[v].len() {
                let c = self.occ[v][i];
                if b {
                    self.n_true[c] -= 1;
                } else {
                    self.n_false[c] -= 1;
                }
                self.toggle(c);
            }
        }
    }

    /// Assigns and propagates to a fixpoint; false on conflict.
    fn set(&mut self, v: usize, b: bool) -> bool {
        let mut queue = vec![(v, b)];
        while let Some((v, b)) = queue.pop() {
            match self.value[v] {
                Some(x) if x == b => continue,
                Some(_) => return false,
                None => {}
            }
            if !self.assign(v, b) {
                return false;
            }
            for &c in &self.occ[v] {
                let clause = self.f.clauses[c];
                if self.n_true[c] == 1 {
                    for &u in &clause {
                        if self.value[u - 1].is_none() {
                            queue.push((u - 1, false));
                        }
                    }
                } else if self.n_false[c] == 2 {
                    for &u in &clause {
                        if self.value[u - 1].is_none() {
                            queue.push((u - 1, true));
                        }
                    }
                }
            }
        }
        true
    }

    fn pick(&self) -> Option<usize> {
        let mut best: Option<(u8, usize)> = None;
        for (c, clause) in self.f.clauses.iter().enumerate() {
            if self.n_true[c] == 0 {
                let assigned = self.n_false[c];
                if best.is_none_or(|(a, _)| assigned > a) {
                    let v = clause
                        .iter()
                        .map(|&u| u - 1)
                        .find(|&u| self.value[u].is_none())
                        .expect("open clause has a free variable");
                    best = Some((assigned, v));
                }
            }
        }
        best.map(|(_, v)| v)
    }

    fn run(&mut self) -> Result<()> {
        if self.done {
            return Ok(());
        }
        self.tick()?;
        let Some(v) = self.pick() else {
            self.leaf();
            return Ok(());
        };
        for b in [true, false] {
            let mark = self.trail.len();
            if self.set(v, b) {
                self.run()?;
            }
            self.undo_to(mark);
            if self.done {
                break;
            }
        }
        Ok(())
    }

    /// Depth-first decision in variable order. Residual states that failed
    /// once are remembered by hash, so a frontier reached along different
    /// paths is refuted only once.
    fn decide(&mut self) -> Result<bool> {
        struct Frame {
            var: usize,
            tried: u8,
            mark: usize,
            key: u128,
        }
        let mut stack: Vec<Frame> = Vec::new();
        let mut from = 0;
        loop {
            self.tick()?;
            let next = (from..self.value.len()).find(|&u| self.value[u].is_none() && !self.occ[u].is_empty());
            let Some(var) = next else {
                return Ok(true);
            };
            if !self.failed.contains(&self.hash) {
                stack.push(Frame {
                    var,
                    tried: 0,
                    mark: self.trail.len(),
                    key: self.hash,
                });
            }
            loop {
                let Some(top) = stack.last_mut() else {
                    return Ok(false);
                };
                let (var, mark) = (top.var, top.mark);
                self.undo_to(mark);
                if top.tried == 2 {
                    self.failed.insert(top.key);
                    stack.pop();
                    continue;
                }
                let b = top.tried == 0;
                top.tried += 1;
                if self.set(var, b) {
                    from = var + 1;
                    break;
                }
            }
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        match self.max_nodes {
            Some(m) if self.nodes > m => Err(FormulaError::BudgetExceeded(m)),
            _ => Ok(()),
        }
    }

    /// Splits open clauses into groups connected through unassigned variables.
    fn components(&mut self, open: &[usize]) -> Vec<Vec<usize>> {
        self.generation += 1;
        let g = self.generation;
        let mut out = Vec::new();
        for &start in open {
            if self.mark[start] == g {
                continue;
            }
            self.mark[start] = g;
            let mut comp = vec![start];
            let mut i = 0;
            while i < comp.len() {
                let c = comp[i];
                i += 1;
                for &u in &self.f.clauses[c] {
                    if self.value[u - 1].is_some() {
                        continue;
                    }
                    for &d in &self.occ[u - 1] {
                        if self.mark[d] != g && self.n_true[d] == 0 {
                            self.mark[d] = g;
                            comp.push(d);
                        }
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// The open clauses with their unassigned positions; assigned members of
    /// an open clause are necessarily false, so this fixes the residual
    /// problem exactly.
    fn key(&self, comp: &[usize]) -> Vec<u64> {
        comp.iter()
            .map(|&c| {
                let mask = self.f.clauses[c]
                    .iter()
                    .enumerate()
                    .fold(0u64, |m, (i, &u)| m | (self.value[u - 1].is_none() as u64) << i);
                (c as u64) << 3 | mask
            })
            .collect()
    }

    /// Models of one component, or 0/1 in decide mode. Residual components
    /// are memoized.
    fn solve_component(&mut self, mut comp: Vec<usize>) -> Result<BigUint> {
        self.tick()?;
        comp.sort_unstable();
        let key = self.key(&comp);
        if let Some(v) = self.cache.get(&key) {
            return Ok(v.clone());
        }
        let v = comp
            .iter()
            .flat_map(|&c| self.f.clauses[c])
            .map(|u| u - 1)
            .filter(|&u| self.value[u].is_none())
            .min()
            .expect("open clause has a free variable");
        let mut total = BigUint::zero();
        for b in [true, false] {
            let mark = self.trail.len();
            if self.set(v, b) {
                let open: Vec<usize> = comp.iter().copied().filter(|&c| self.n_true[c] == 0).collect();
                let mut prod = BigUint::one();
                for part in self.components(&open) {
                    let r = self.solve_component(part);
                    let r = match r {
                        Ok(r) => r,
                        Err(e) => {
                            self.undo_to(mark);
                            return Err(e);
                        }
                    };
                    if r.is_zero() {
                        prod = BigUint::zero();
                        break;
                    }
                    prod *= r;
                }
                total += prod;
            }
            self.undo_to(mark);
            if self.mode == SolveMode::Decide && !total.is_zero() {
                break;
            }
        }
        self.cache.insert(key, total.clone());
        Ok(total)
    }

    fn run_components(&mut self) -> Result<()> {
        let open: Vec<usize> = (0..self.f.clauses.len()).filter(|&c| self.n_true[c] == 0).collect();
        let mut in_open = vec![false; self.value.len()];
        for &c in &open {
            for &u in &self.f.clauses[c] {
                in_open[u - 1] = true;
            }
        }
        let free = (0..self.value.len())
            .filter(|&v| self.value[v].is_none() && !in_open[v])
            .count();
        let mut total = BigUint::one() << free;
        for part in self.components(&open) {
            let r = self.solve_component(part)?;
            if r.is_zero() {
                total = BigUint::zero();
                break;
            }
            total *= r;
        }
        self.count = if self.mode == SolveMode::Decide && !total.is_zero() {
            BigUint::one()
        } else {
            total
        };
        Ok(())
    }

    fn leaf(&mut self) {
        let free: Vec<usize> = (0..self.value.len())
            .filter(|&v| self.value[v].is_none())
            .collect();
        match self.mode {
            SolveMode::Decide => {
                self.count = BigUint::one();
                self.done = true;
            }
            SolveMode::Count => self.count += BigUint::one() << free.len(),
            SolveMode::EnumerateAll => {
                self.count += BigUint::one() << free.len();
                let base: Vec<bool> = self.value.iter().map(|x| x.unwrap_or(false)).collect();
                for bits in 0u64..(1u64 << free.len().min(63)) {
                    let mut m = base.clone();
                    for (i, &v) in free.iter().enumerate() {
                        m[v] = bits >> i & 1 == 1;
                    }
                    self.models.push(m);
                }
            }
        }
    }
}

/// Backtracking with propagation: a true variable falsifies its clause-mates,
/// two false variables force the third true. Counting splits the open clauses
/// into independent components and caches component results; deciding caches
/// refuted residual states.
pub fn backtrack_solve_1in3(
    f: &Formula1in3,
    mode: SolveMode,
    max_nodes: Option<u64>,
) -> Result<SolveOutcome> {
    backtrack_with_fixed(f, &[], mode, max_nodes)
}

/// As [`backtrack_solve_1in3`], with some variables fixed in advance.
pub fn backtrack_with_fixed(
    f: &Formula1in3,
    fixed: &[(usize, bool)],
    mode: SolveMode,
    max_nodes: Option<u64>,
) -> Result<SolveOutcome> {
    let mut occ = vec![Vec::new(); f.num_vars];
    for (j, c) in f.clauses.iter().enumerate() {
        for &v in c {
            occ[v - 1].push(j);
        }
    }
    let mut s = Search {
        f,
        occ,
        value: vec![None; f.num_vars],
        n_true: vec![0; f.clauses.len()],
        n_false: vec![0; f.clauses.len()],
        trail: Vec::new(),
        mode,
        count: BigUint::zero(),
        models: Vec::new(),
        nodes: 0,
        max_nodes,
        done: false,
        cache: HashMap::new(),
        mark: vec![0; f.clauses.len()],
        generation: 0,
        hash: 0,
        failed: HashSet::new(),
    };
    for c in 0..f.clauses.len() {
        s.toggle(c);
    }
    let mut ok = true;
    for &(v, b) in fixed {
        if v == 0 || v > f.num_vars {
            return Err(FormulaError::VariableRange(v));
        }
        ok &= s.set(v - 1, b);
    }
    if ok {
        match mode {
            SolveMode::EnumerateAll => s.run()?,
            SolveMode::Decide => {
                if s.decide()? {
                    s.count = BigUint::one();
                    s.models.push(s.value.iter().map(|x| x.unwrap_or(false)).collect());
                }
            }
            SolveMode::Count => s.run_components()?,
        }
    }
    let mut models = s.models;
    models.sort();
    Ok(SolveOutcome {
        satisfiable: !s.count.is_zero(),
        count: s.count,
        models,
        nodes: s.nodes,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Occurrences {
    pub counts: BTreeMap<usize, usize>,
    pub is_cubic: bool,
}

/// Occurrences per variable; variables that never occur are not listed.
pub fn occurrence_counts(f: &Formula1in3) -> Occurrences {
    let mut counts = BTreeMap::new();
    for c in &f.clauses {
        for &v in c {
            *counts.entry(v).or_insert(0) += 1;
        }
    }
    let is_cubic = counts.values().all(|&k| k == 3);
    Occurrences { counts, is_cubic }
}

/// A planar embedding of the incidence graph with derived faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceEmbedding {
    pub rotation: RotationSystem,
    pub faces: Vec<Vec<Dart>>,
    pub dual_adjacency: Vec<std::collections::BTreeSet<usize>>,
    /// Index of the longest face, ties to the lowest index.
    pub outer_face: Option<usize>,
}

impl IncidenceEmbedding {
    pub fn from_rotation(rotation: RotationSystem) -> IncidenceEmbedding {
        let faces = rotation.faces();
        let dual = dual_adjacency(&faces);
        let outer_face = outer_face(&faces);
        IncidenceEmbedding {
            rotation,
            faces,
            dual_adjacency: dual,
            outer_face,
        }
    }
}

pub fn outer_face(faces: &[Vec<Dart>]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, f) in faces.iter().enumerate() {
        if best.is_none_or(|b| f.len() > faces[b].len()) {
            best = Some(i);
        }
    }
    best
}

/// Uses the formula's own rotation system when present and valid, otherwise
/// computes one. `None` means the incidence graph is not planar.
pub fn embed_planar(f: &Formula1in3) -> Option<IncidenceEmbedding> {
    let g = f.incidence_graph();
    if let Some(r) = &f.embedding {
        if r.is_planar_embedding(&g) {
            return Some(IncidenceEmbedding::from_rotation(r.clone()));
        }
    }
    planar_embedding(&g).ok().map(IncidenceEmbedding::from_rotation)
}

pub fn parse_formula(text: &str) -> Result<Formula1in3> {
    let perr = |line: usize, msg: &str| FormulaError::Parse {
        line,
        msg: msg.to_string(),
    };
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut elines: Vec<(usize, Vec<String>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.is_empty() || line == "c" || line.starts_with("c ") {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "p" => {
                if header.is_some() || toks.len() != 4 || toks[1] != "m13" {
                    return Err(perr(ln, "expected `p m13 <vars> <clauses>`"));
                }
                let n = toks[2].parse().map_err(|_| perr(ln, "bad variable count"))?;
                let m = toks[3].parse().map_err(|_| perr(ln, "bad clause count"))?;
                header = Some((n, m));
            }
            "e" => {
                if toks.len() < 2 {
                    return Err(perr(ln, "empty rotation line"));
                }
                elines.push((ln, toks[1..].iter().map(|s| s.to_string()).collect()));
            }
            _ => {
                if header.is_none() {
                    return Err(perr(ln, "clause before header"));
                }
                let nums: std::result::Result<Vec<usize>, _> =
                    toks.iter().map(|t| t.parse::<usize>()).collect();
                let nums = nums.map_err(|_| perr(ln, "bad clause"))?;
                if nums.len() != 4 || nums[3] != 0 {
                    return Err(perr(ln, "clause must be three variables and 0"));
                }
                clauses.push([nums[0], nums[1], nums[2]]);
            }
        }
    }
    let (n, m) = header.ok_or_else(|| perr(0, "missing header"))?;
    if clauses.len() != m {
        return Err(perr(0, "clause count does not match header"));
    }
    let mut f = Formula1in3::new(n, clauses)?;
    if !elines.is_empty() {
        let total = n + m;
        let mut rotation = vec![Vec::new(); total];
        let mut seen = vec![false; total];
        for (ln, names) in elines {
            let v = f.vertex_of(&names[0]).ok_or_else(|| perr(ln, "unknown vertex"))?;
            if seen[v] {
                return Err(perr(ln, "vertex rotation given twice"));
            }
            seen[v] = true;
            for nb in &names[1..] {
                rotation[v].push(f.vertex_of(nb).ok_or_else(|| perr(ln, "unknown vertex"))?);
            }
        }
        let r = RotationSystem { rotation };
        if !r.is_planar_embedding(&f.incidence_graph()) {
            return Err(FormulaError::BadEmbedding);
        }
        f.embedding = Some(r);
    }
    Ok(f)
}

pub fn emit_formula(f: &Formula1in3) -> String {
    let mut s = format!("p m13 {} {}\n", f.num_vars, f.clauses.len());
    for c in &f.clauses {
        let _ = writeln!(s, "{} {} {} 0", c[0], c[1], c[2]);
    }
    if let Some(r) = &f.embedding {
        for (v, rot) in r.rotation.iter().enumerate() {
            if rot.is_empty() {
                continue;
            }
            s.push_str("e ");
            s.push_str(&f.vertex_name(v));
            for &u in rot {
                s.push(' ');
                s.push_str(&f.vertex_name(u));
            }
            s.push('\n');
        }
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateOp {
    And,
    Or,
    Not,
}

impl GateOp {
    pub fn as_str(self) -> &'static str {
        match self {
            GateOp::And => "and",
            GateOp::Or => "or",
            GateOp::Not => "not",
        }
    }
}

/// A gate. Operands are node indices: inputs first, then gates in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub name: String,
    pub op: GateOp,
    pub args: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    pub inputs: Vec<String>,
    pub gates: Vec<Gate>,
    pub output: usize,
}

impl Circuit {
    pub fn num_nodes(&self) -> usize {
        self.inputs.len() + self.gates.len()
    }

    pub fn node_name(&self, node: usize) -> &str {
        if node < self.inputs.len() {
            &self.inputs[node]
        } else {
            &self.gates[node - self.inputs.len()].name
        }
    }

    /// Node values under an input assignment.
    pub fn eval_all(&self, inputs: &[bool]) -> Result<Vec<bool>> {
        if inputs.len() != self.inputs.len() {
            return Err(FormulaError::Arity {
                expected: self.inputs.len(),
                found: inputs.len(),
            });
        }
        let mut val = inputs.to_vec();
        for g in &self.gates {
            let v = match g.op {
                GateOp::And => val[g.args[0]] && val[g.args[1]],
                GateOp::Or => val[g.args[0]] || val[g.args[1]],
                GateOp::Not => !val[g.args[0]],
            };
            val.push(v);
        }
        Ok(val)
    }

    pub fn is_monotone(&self) -> bool {
        self.gates.iter().all(|g| g.op != GateOp::Not)
    }

    /// Number of satisfying input assignments.
    pub fn model_count(&self) -> Result<u64> {
        let n = self.inputs.len();
        if n > BRUTE_FORCE_CAP {
            return Err(FormulaError::TooManyVariables(n));
        }
        let mut k = 0;
        for bits in 0u64..(1u64 << n) {
            let a: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
            if eval_circuit(self, &a)? {
                k += 1;
            }
        }
        Ok(k)
    }
}

pub fn eval_circuit(c: &Circuit, inputs: &[bool]) -> Result<bool> {
    Ok(c.eval_all(inputs)?[c.output])
}

fn is_identifier(s: &str) -> bool {
    let mut ch = s.chars();
    matches!(ch.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && ch.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn parse_netlist(text: &str) -> Result<Circuit> {
    let perr = |line: usize, msg: String| FormulaError::Parse { line, msg };
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut inputs = Vec::new();
    let mut pending: Vec<(usize, String, GateOp, Vec<String>)> = Vec::new();
    let mut output: Option<(usize, String)> = None;
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let arity = match toks[0] {
            "input" | "output" => 1,
            "not" => 2,
            "and" | "or" => 3,
            other => return Err(perr(ln, format!("unknown statement `{other}`"))),
        };
        if toks.len() != arity + 1 {
            return Err(perr(ln, format!("`{}` takes {} names", toks[0], arity)));
        }
        if let Some(bad) = toks[1..].iter().find(|t| !is_identifier(t)) {
            return Err(perr(ln, format!("`{bad}` is not an identifier")));
        }
        match toks[0] {
            "input" => {
                if !pending.is_empty() {
                    return Err(perr(ln, "inputs must precede gates".into()));
                }
                if ids.insert(toks[1].to_string(), inputs.len()).is_some() {
                    return Err(perr(ln, format!("`{}` defined twice", toks[1])));
                }
                inputs.push(toks[1].to_string());
            }
            "output" => {
                if output.is_some() {
                    return Err(perr(ln, "more than one output".into()));
                }
                output = Some((ln, toks[1].to_string()));
            }
            op => {
                let op = match op {
                    "and" => GateOp::And,
                    "or" => GateOp::Or,
                    _ => GateOp::Not,
                };
                let name = toks[1].to_string();
                for a in &toks[2..] {
                    if !ids.contains_key(*a) {
                        return Err(perr(ln, format!("`{a}` used before definition")));
                    }
                }
                let id = inputs.len() + pending.len();
                if ids.insert(name.clone(), id).is_some() {
                    return Err(perr(ln, format!("`{name}` defined twice")));
                }
                pending.push((ln, name, op, toks[2..].iter().map(|s| s.to_string()).collect()));
            }
        }
    }
    let gates = pending
        .into_iter()
        .map(|(_, name, op, args)| Gate {
            name,
            op,
            args: args.iter().map(|a| ids[a]).collect(),
        })
        .collect();
    let (ln, out) = output.ok_or_else(|| perr(0, "missing output".into()))?;
    let output = *ids
        .get(&out)
        .ok_or_else(|| perr(ln, format!("unknown output `{out}`")))?;
    Ok(Circuit {
        inputs,
        gates,
        output,
    })
}

pub fn emit_netlist(c: &Circuit) -> String {
    let mut s = String::new();
    for i in &c.inputs {
        let _ = writeln!(s, "input {i}");
    }
    for g in &c.gates {
        let _ = write!(s, "{} {}", g.op.as_str(), g.name);
        for &a in &g.args {
            let _ = write!(s, " {}", c.node_name(a));
        }
        s.push('\n');
    }
    let _ = writeln!(s, "output {}", c.node_name(c.output));
    s
}

/// NOT-free circuit over inputs `x1..xn, x̄1..x̄n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotonePairing {
    pub circuit: Circuit,
    /// Input indices `(x_i, x̄_i)`.
    pub pairs: Vec<(usize, usize)>,
}

/// Pushes negations down to the inputs with De Morgan's laws.
pub fn monotonize(c: &Circuit) -> MonotonePairing {
    let n = c.inputs.len();
    let mut used: std::collections::HashSet<String> = c.inputs.iter().cloned().collect();
    used.extend(c.gates.iter().map(|g| g.name.clone()));
    let mut fresh = |base: String| {
        let mut name = base;
        while used.contains(&name) {
            name.push('_');
        }
        used.insert(name.clone());
        name
    };
    let mut inputs = c.inputs.clone();
    for i in 0..n {
        let name = fresh(format!("{}_bar", c.inputs[i]));
        inputs.push(name);
    }
    let mut out = Circuit {
        inputs,
        gates: Vec::new(),
        output: 0,
    };
    let mut memo: HashMap<(usize, bool), usize> = HashMap::new();
    // iterative post-order over (node, polarity)
    let mut stack = vec![(c.output, true, false)];
    while let Some((node, pos, expanded)) = stack.pop() {
        if memo.contains_key(&(node, pos)) {
            continue;
        }
        if node < n {
            memo.insert((node, pos), if pos { node } else { n + node });
            continue;
        }
        let g = &c.gates[node - n];
        let (op, kids): (Option<GateOp>, Vec<(usize, bool)>) = match (g.op, pos) {
            (GateOp::Not, p) => (None, vec![(g.args[0], !p)]),
            (GateOp::And, true) | (GateOp::Or, false) => {
                (Some(GateOp::And), g.args.iter().map(|&a| (a, pos)).collect())
            }
            (GateOp::Or, true) | (GateOp::And, false) => {
                (Some(GateOp::Or), g.args.iter().map(|&a| (a, pos)).collect())
            }
        };
        if !expanded {
            stack.push((node, pos, true));
            for &(k, p) in kids.iter().rev() {
                stack.push((k, p, false));
            }
            continue;
        }
        let id = match op {
            None => memo[&kids[0]],
            Some(op) => {
                let name = if pos {
                    fresh(g.name.clone())
                } else {
                    fresh(format!("{}_bar", g.name))
                };
                out.gates.push(Gate {
                    name,
                    op,
                    args: kids.iter().map(|k| memo[k]).collect(),
                });
                2 * n + out.gates.len() - 1
            }
        };
        memo.insert((node, pos), id);
    }
    out.output = memo[&(c.output, true)];
    MonotonePairing {
        circuit: out,
        pairs: (0..n).map(|i| (i, n + i)).collect(),
    }
}

/// Evaluates the monotone circuit on `(a, ā)`.
pub fn eval_paired(mp: &MonotonePairing, a: &[bool]) -> Result<bool> {
    let mut full = a.to_vec();
    full.extend(a.iter().map(|b| !b));
    eval_circuit(&mp.circuit, &full)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(n: usize, cl: &[[usize; 3]]) -> Formula1in3 {
        Formula1in3::new(n, cl.to_vec()).unwrap()
    }

    #[test]
    fn eval_examples() {
        let one = f(3, &[[1, 2, 3]]);
        assert!(eval_1in3(&one, &[true, false, false]).unwrap());
        assert!(!eval_1in3(&one, &[true, true, false]).unwrap());
        let two = f(4, &[[1, 2, 3], [1, 2, 4]]);
        assert!(eval_1in3(&two, &[true, false, false, false]).unwrap());
        assert!(eval_1in3(&one, &[true]).is_err());
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_models(&f(3, &[[1, 2, 3]])).unwrap().len(), 3);
        assert_eq!(brute_force_models(&f(2, &[])).unwrap().len(), 4);
        assert_eq!(brute_force_models(&f(3, &[[1, 2, 3], [1, 2, 3]])).unwrap().len(), 3);
        assert!(brute_force_models(&f(26, &[])).is_err());
    }

    #[test]
    fn repeated_variable_rejected() {
        assert!(Formula1in3::new(3, vec![[1, 1, 2]]).is_err());
        assert!(Formula1in3::new(2, vec![[1, 2, 3]]).is_err());
    }

    #[test]
    fn backtracking_examples() {
        let one = f(3, &[[1, 2, 3]]);
        let r = backtrack_with_fixed(
            &one,
            &[(1, true), (2, true), (3, true)],
            SolveMode::Decide,
            None,
        )
        .unwrap();
        assert!(!r.satisfiable);
        let r = backtrack_solve_1in3(&one, SolveMode::EnumerateAll, None).unwrap();
        assert_eq!(r.models, brute_force_models(&one).unwrap());
        let k4 = f(4, &[[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]]);
        assert!(!backtrack_solve_1in3(&k4, SolveMode::Decide, None).unwrap().satisfiable);
        assert!(backtrack_solve_1in3(&k4, SolveMode::Decide, Some(0)).is_err());
    }

    #[test]
    fn occurrence_examples() {
        let o = occurrence_counts(&f(3, &[[1, 2, 3]]));
        assert!(o.counts.values().all(|&k| k == 1) && !o.is_cubic);
        let k4 = f(4, &[[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]]);
        assert!(occurrence_counts(&k4).is_cubic);
        let empty = occurrence_counts(&f(0, &[]));
        assert!(empty.counts.is_empty() && empty.is_cubic);
    }

    #[test]
    fn embedding_examples() {
        let one = f(3, &[[1, 2, 3]]);
        let e = embed_planar(&one).unwrap();
        // a star has a single face
        assert_eq!(e.faces.len(), 1);
        let k4 = f(4, &[[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]]);
        let e = embed_planar(&k4).unwrap();
        assert_eq!(e.faces.len(), 6);
        // three copies of one clause give K_{3,3}
        let k33 = f(6, &[[1, 2, 3], [1, 2, 3], [1, 2, 3]]);
        assert!(embed_planar(&k33).is_none());
    }

    #[test]
    fn formula_round_trip() {
        let text = "p m13 4 4\n1 2 3 0\n1 2 4 0\n1 3 4 0\n2 3 4 0\n";
        let mut g = parse_formula(text).unwrap();
        assert_eq!(emit_formula(&g), text);
        g.embedding = Some(embed_planar(&g).unwrap().rotation);
        let with_e = emit_formula(&g);
        let h = parse_formula(&with_e).unwrap();
        assert_eq!(h, g);
        assert_eq!(emit_formula(&h), with_e);
        let commented = "c hello\np m13 3 1\nc inner\n1 2 3 0\n";
        assert_eq!(emit_formula(&parse_formula(commented).unwrap()), "p m13 3 1\n1 2 3 0\n");
    }

    #[test]
    fn formula_parse_errors() {
        assert!(parse_formula("1 2 3 0\n").is_err());
        assert!(parse_formula("p m13 3 2\n1 2 3 0\n").is_err());
        assert!(parse_formula("p m13 3 1\n1 2 3\n").is_err());
        assert!(parse_formula("p m13 3 1\n1 1 3 0\n").is_err());
        assert!(parse_formula("p m13 3 1\n1 2 3 0\ne v1 k2\n").is_err());
    }

    fn circ(text: &str) -> Circuit {
        parse_netlist(text).unwrap()
    }

    #[test]
    fn circuit_examples() {
        let and = circ("input x\ninput y\nand g x y\noutput g\n");
        assert!(!eval_circuit(&and, &[true, false]).unwrap());
        let not = circ("input x\nnot g x\noutput g\n");
        assert!(!eval_circuit(&not, &[true]).unwrap());
        let c = circ("input x\ninput y\ninput z\nand a x y\nor o a z\noutput o\n");
        assert!(eval_circuit(&c, &[false, false, true]).unwrap());
        assert!(eval_circuit(&c, &[true]).is_err());
        assert_eq!(emit_netlist(&c), "input x\ninput y\ninput z\nand a x y\nor o a z\noutput o\n");
    }

    #[test]
    fn netlist_errors() {
        assert!(parse_netlist("input x\nand g x y\noutput g\n").is_err());
        assert!(parse_netlist("input x\nnot x x\noutput x\n").is_err());
        assert!(parse_netlist("input x\n").is_err());
        assert!(parse_netlist("input 1x\noutput 1x\n").is_err());
        assert!(parse_netlist("input x\nxor g x x\noutput g\n").is_err());
    }

    #[test]
    fn monotonize_examples() {
        let not = monotonize(&circ("input x\nnot g x\noutput g\n"));
        assert!(not.circuit.gates.is_empty());
        assert_eq!(not.circuit.output, 1);
        assert_eq!(not.pairs, vec![(0, 1)]);
        let nand = monotonize(&circ("input x\ninput y\nand a x y\nnot g a\noutput g\n"));
        assert_eq!(nand.circuit.gates.len(), 1);
        assert_eq!(nand.circuit.gates[0].op, GateOp::Or);
        assert_eq!(nand.circuit.gates[0].args, vec![2, 3]);
        let xx = monotonize(&circ("input x\nand g x x\noutput g\n"));
        assert_eq!(xx.circuit.gates[0].op, GateOp::And);
        assert_eq!(xx.circuit.gates[0].args, vec![0, 0]);
        assert_eq!(xx.pairs, vec![(0, 1)]);
    }

    /// Random topologically ordered circuit.
    fn arb_circuit(max_inputs: usize, max_gates: usize) -> impl Strategy<Value = Circuit> {
        (1..=max_inputs, 0..=max_gates)
            .prop_flat_map(|(n, k)| {
                let gates = (0..k)
                    .map(|i| (0u8..3, 0..n + i, 0..n + i))
                    .collect::<Vec<_>>();
                (Just(n), gates, 0..n + k)
            })
            .prop_map(|(n, gates, out)| Circuit {
                inputs: (0..n).map(|i| format!("x{i}")).collect(),
                gates: gates
                    .into_iter()
                    .enumerate()
                    .map(|(i, (op, a, b))| {
                        let op = [GateOp::And, GateOp::Or, GateOp::Not][op as usize];
                        Gate {
                            name: format!("g{i}"),
                            op,
                            args: if op == GateOp::Not { vec![a] } else { vec![a, b] },
                        }
                    })
                    .collect(),
                output: out,
            })
    }

    fn arb_formula(max_vars: usize, max_clauses: usize) -> impl Strategy<Value = Formula1in3> {
        (3..=max_vars).prop_flat_map(move |n| {
            proptest::collection::vec(
                proptest::sample::subsequence((1..=n).collect::<Vec<_>>(), 3),
                0..=max_clauses,
            )
            .prop_map(move |cl| {
                Formula1in3::new(n, cl.into_iter().map(|c| [c[0], c[1], c[2]]).collect())
                    .unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn monotonize_preserves_semantics(c in arb_circuit(5, 8)) {
            let mp = monotonize(&c);
            prop_assert!(mp.circuit.is_monotone());
            let n = c.inputs.len();
            for bits in 0u32..(1 << n) {
                let a: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
                prop_assert_eq!(eval_circuit(&c, &a).unwrap(), eval_paired(&mp, &a).unwrap());
            }
        }

        #[test]
        fn monotone_circuits_are_monotone(c in arb_circuit(4, 6)) {
            let mp = monotonize(&c);
            let m = &mp.circuit;
            let n = m.inputs.len();
            for bits in 0u32..(1 << n) {
                let a: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
                if !eval_circuit(m, &a).unwrap() {
                    continue;
                }
                for i in 0..n {
                    let mut b = a.clone();
                    b[i] = true;
                    prop_assert!(eval_circuit(m, &b).unwrap());
                }
            }
        }

        #[test]
        fn backtracking_matches_brute_force(f in arb_formula(12, 8)) {
            let bf = brute_force_models(&f).unwrap();
            let count = backtrack_solve_1in3(&f, SolveMode::Count, None).unwrap();
            prop_assert_eq!(count.count, BigUint::from(bf.len()));
            let dec = backtrack_solve_1in3(&f, SolveMode::Decide, None).unwrap();
            prop_assert_eq!(dec.satisfiable, !bf.is_empty());
            let all = backtrack_solve_1in3(&f, SolveMode::EnumerateAll, None).unwrap();
            prop_assert_eq!(all.models, bf);
        }

        #[test]
        fn embeddings_satisfy_euler(f in arb_formula(7, 5)) {
            let g = f.incidence_graph();
            if let Some(e) = embed_planar(&f) {
                prop_assert!(e.rotation.is_planar_embedding(&g));
                let total: usize = e.faces.iter().map(|x| x.len()).sum();
                prop_assert_eq!(total, 2 * g.num_edges());
            }
        }

        #[test]
        fn netlist_round_trip(c in arb_circuit(4, 6)) {
            let text = emit_netlist(&c);
            let d = parse_netlist(&text).unwrap();
            prop_assert_eq!(emit_netlist(&d), text);
        }
    }
}
