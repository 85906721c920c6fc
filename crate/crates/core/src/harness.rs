//! Verification procedures: gadget truth tables, compiler parsimony and
//! existence, the cubic reduction, and the acceptance checks run by
//! `selftest`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::compiler::catalog::{catalog, gadget};
use crate::compiler::gadget::{forced_region, GadgetGeometry};
use crate::compiler::{compile_1in3_2d, compile_circuit_2d, compile_monotone_3d, lift_4d};
use crate::formula::{
    backtrack_solve_1in3, backtrack_with_fixed, brute_force_models, embed_planar, emit_formula, monotonize,
    occurrence_counts, parse_formula, parse_netlist, Circuit, Formula1in3, Gate, GateOp, SolveMode,
};
use crate::lattice::{builtin_tileset, emit_region, parse_region, Cell, Region, TileShape};
use crate::reduction::{
    optional_switch, partial_switch, reduce_to_cubic, three_way_verifier, triangle, lift_model, Builder,
};
use crate::solver::{
    count_tilings, count_tilings_with, enumerate_tilings_with, exists_tiling_with, oracle_count, Budget,
    SolverError, Tiling,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

impl Verdict {
    /// Process exit code: 0 pass, 1 fail, 3 inconclusive.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportRow {
    /// Port values, assignment or property being checked.
    pub case: String,
    pub expected: String,
    pub observed: String,
    pub status: Verdict,
}

impl ReportRow {
    fn compare(case: impl Into<String>, expected: impl ToString, observed: impl ToString) -> ReportRow {
        let (expected, observed) = (expected.to_string(), observed.to_string());
        let status = if expected == observed { Verdict::Pass } else { Verdict::Fail };
        ReportRow {
            case: case.into(),
            expected,
            observed,
            status,
        }
    }

    fn inconclusive(case: impl Into<String>, expected: impl ToString, why: impl ToString) -> ReportRow {
        ReportRow {
            case: case.into(),
            expected: expected.to_string(),
            observed: why.to_string(),
            status: Verdict::Inconclusive,
        }
    }

    fn failed(case: impl Into<String>, expected: impl ToString, why: impl ToString) -> ReportRow {
        ReportRow {
            case: case.into(),
            expected: expected.to_string(),
            observed: why.to_string(),
            status: Verdict::Fail,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunStats {
    pub elapsed: Duration,
    pub rows: usize,
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub subject: String,
    pub rows: Vec<ReportRow>,
    pub verdict: Verdict,
    pub stats: RunStats,
}

impl VerificationReport {
    /// Any failing row fails the report; otherwise any inconclusive row makes
    /// it inconclusive. An empty report is inconclusive.
    pub fn new(subject: impl Into<String>, rows: Vec<ReportRow>, started: Instant) -> VerificationReport {
        let verdict = if rows.is_empty() {
            Verdict::Inconclusive
        } else {
            rows.iter().map(|r| r.status).max().unwrap_or(Verdict::Pass)
        };
        VerificationReport {
            subject: subject.into(),
            stats: RunStats {
                elapsed: started.elapsed(),
                rows: rows.len(),
            },
            rows,
            verdict,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Rows that did not pass.
    pub fn problems(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| r.status != Verdict::Pass)
    }
}

/// Deterministic text: timing is left out.
impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "subject {}", self.subject)?;
        for r in &self.rows {
            writeln!(f, "row {} expected {} observed {} {}", r.case, r.expected, r.observed, r.status)?;
        }
        writeln!(f, "verdict {}", self.verdict)
    }
}

fn bits(values: &[bool]) -> String {
    values.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Forces every port combination with dead-ended stubs and counts the
/// tilings of each forced region. Rows absent from the truth table must have
/// no tiling. A combination whose search runs out of budget is inconclusive.
pub fn verify_gadget(g: &GadgetGeometry, budget: Budget) -> VerificationReport {
    let started = Instant::now();
    let tiles = g.family.tileset();
    let k = g.ports.len();
    let names: Vec<&str> = g.ports.iter().map(|p| p.name.as_str()).collect();
    let mut rows = Vec::new();
    for mask in 0..(1u32 << k) {
        let values: Vec<bool> = (0..k).map(|i| mask >> i & 1 == 1).collect();
        let case = format!("{}={}", names.join(","), bits(&values));
        let expected = g.expected(&values);
        let region = match forced_region(&g.region, &g.ports, &values, 4) {
            Ok(r) => r,
            Err(e) => {
                rows.push(ReportRow::failed(case, expected, format!("stub:{}", e.replace(' ', "_"))));
                continue;
            }
        };
        rows.push(match count_tilings_with(&region, &tiles, budget) {
            Ok(n) => ReportRow::compare(case, expected, n),
            Err(SolverError::BudgetExceeded(_)) => ReportRow::inconclusive(case, expected, "budget"),
            Err(e) => ReportRow::failed(case, expected, e),
        });
    }
    VerificationReport::new(format!("gadget:{}", g.name), rows, started)
}

/// Number of tilings of the compiled region against the number of
/// satisfying assignments.
pub fn verify_parsimony(c: &Circuit, budget: Budget) -> VerificationReport {
    let started = Instant::now();
    let subject = format!("parsimony:{}", circuit_id(c));
    let models = match c.model_count() {
        Ok(m) => m,
        Err(e) => return VerificationReport::new(subject, vec![ReportRow::failed("models", "count", e)], started),
    };
    let row = match compile_circuit_2d(c) {
        Err(e) => ReportRow::failed("tilings", models, format!("compile:{e}").replace(' ', "_")),
        Ok(inst) => match count_tilings_with(&inst.region, &inst.family.tileset(), budget) {
            Ok(n) => ReportRow::compare("tilings", models, n),
            Err(SolverError::BudgetExceeded(_)) => ReportRow::inconclusive("tilings", models, "budget"),
            Err(e) => ReportRow::failed("tilings", models, e),
        },
    };
    VerificationReport::new(subject, vec![row], started)
}

/// Checks that E″ is cubic, planar and monotone and that it is satisfiable
/// exactly when E is. A model of E is lifted to E″ and checked clause by
/// clause; an unsatisfiable E needs a complete refutation of E″.
pub fn verify_reduction(e: &Formula1in3, max_nodes: Option<u64>) -> VerificationReport {
    let started = Instant::now();
    let subject = format!("reduction:{}", formula_id(e));
    let mut rows = Vec::new();
    let red = match reduce_to_cubic(e) {
        Ok(r) => r,
        Err(err) => {
            rows.push(ReportRow::failed("reduce", "ok", err.to_string().replace(' ', "_")));
            return VerificationReport::new(subject, rows, started);
        }
    };
    let out = &red.formula;
    let occ = occurrence_counts(out);
    let every_var = occ.is_cubic && occ.counts.len() == out.num_vars;
    rows.push(ReportRow::compare("cubic", true, every_var));
    let planar = out
        .embedding
        .as_ref()
        .is_some_and(|r| r.is_planar_embedding(&out.incidence_graph()));
    rows.push(ReportRow::compare("planar", true, planar));
    // clauses are triples of distinct variables: no literal can be negative
    let monotone = out.clauses.iter().all(|c| c[0] != c[1] && c[1] != c[2] && c[0] != c[2]);
    rows.push(ReportRow::compare("monotone", true, monotone));
    let models = match brute_force_models(e) {
        Ok(m) => m,
        Err(err) => {
            rows.push(ReportRow::failed("satisfiable", "?", err));
            return VerificationReport::new(subject, rows, started);
        }
    };
    let sat_e = !models.is_empty();
    let observed = match models.first() {
        Some(model) => match lift_model(&red, model, max_nodes) {
            Ok(Some(lifted)) => Ok(crate::formula::eval_1in3(out, &lifted).unwrap_or(false)),
            Ok(None) => decide(out, max_nodes),
            Err(err) => Err(err.to_string()),
        },
        None => decide(out, max_nodes),
    };
    rows.push(match observed {
        Ok(sat) => ReportRow::compare("satisfiable", sat_e, sat),
        Err(why) if why == "budget" => ReportRow::inconclusive("satisfiable", sat_e, why),
        Err(why) => ReportRow::failed("satisfiable", sat_e, why.replace(' ', "_")),
    });
    VerificationReport::new(subject, rows, started)
}

fn decide(f: &Formula1in3, max_nodes: Option<u64>) -> Result<bool, String> {
    match backtrack_solve_1in3(f, SolveMode::Decide, max_nodes) {
        Ok(r) => Ok(r.satisfiable),
        Err(crate::formula::FormulaError::BudgetExceeded(_)) => Err("budget".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn circuit_id(c: &Circuit) -> String {
    let gates: Vec<String> = c
        .gates
        .iter()
        .map(|g| {
            let args: Vec<&str> = g.args.iter().map(|&a| c.node_name(a)).collect();
            format!("{}={}({})", g.name, g.op.as_str(), args.join(","))
        })
        .collect();
    format!("[{}|{}|{}]", c.inputs.join(","), gates.join(";"), c.node_name(c.output))
}

fn formula_id(f: &Formula1in3) -> String {
    let clauses: Vec<String> = f.clauses.iter().map(|c| format!("{}.{}.{}", c[0], c[1], c[2])).collect();
    format!("n{}[{}]", f.num_vars, clauses.join(","))
}

// ---------------------------------------------------------------------------
// random instances

/// Every built-in tileset of the given dimension.
pub fn builtin_tilesets(dim: usize) -> Vec<Vec<TileShape>> {
    let names: &[&str] = match dim {
        2 => &["domino2", "right_tromino", "right_tromino,square_tetromino", "domino2,right_tromino"],
        3 => &["domino3", "straight_tromino3", "domino3,straight_tromino3"],
        4 => &["domino4", "straight_tromino4", "domino4,straight_tromino4"],
        _ => &[],
    };
    names.iter().map(|n| builtin_tileset(n).expect("built-in tiles")).collect()
}

/// A random region grown cell by cell inside a small box; three samples in
/// four are grown as connected polyominoes, the rest are scattered.
pub fn random_region(rng: &mut ChaCha8Rng, dim: usize, max_cells: usize, extent: &[i32]) -> Region {
    let target = rng.gen_range(1..=max_cells);
    let in_box = |c: &Cell| c.coords().iter().zip(extent).all(|(&x, &e)| (0..e).contains(&x));
    let random_cell = |rng: &mut ChaCha8Rng| {
        let coords: Vec<i32> = extent.iter().map(|&e| rng.gen_range(0..e)).collect();
        Cell::new(&coords).expect("dimension")
    };
    let mut cells: BTreeSet<Cell> = BTreeSet::new();
    let capacity: i32 = extent.iter().product();
    let target = target.min(capacity as usize);
    let connected = rng.gen_bool(0.75);
    cells.insert(random_cell(rng));
    while cells.len() < target {
        if connected {
            let frontier: Vec<Cell> = cells
                .iter()
                .flat_map(|c| c.neighbors())
                .filter(|n| in_box(n) && !cells.contains(n))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            match frontier.choose(rng) {
                Some(&c) => {
                    cells.insert(c);
                }
                None => break,
            }
        } else {
            cells.insert(random_cell(rng));
        }
    }
    let mut region = Region::new(dim).expect("dimension");
    for c in cells {
        region.insert(c).expect("dimension");
    }
    region
}

/// Random circuit over up to `max_inputs` inputs and up to `max_gates`
/// gates; the last gate is the output.
pub fn random_circuit(rng: &mut ChaCha8Rng, max_inputs: usize, max_gates: usize, with_not: bool) -> Circuit {
    let n = rng.gen_range(1..=max_inputs);
    let k = rng.gen_range(1..=max_gates);
    let inputs: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let mut gates = Vec::new();
    for j in 0..k {
        let avail = n + j;
        let op = match rng.gen_range(0..if with_not { 3 } else { 2 }) {
            0 => GateOp::And,
            1 => GateOp::Or,
            _ => GateOp::Not,
        };
        let args = if op == GateOp::Not {
            vec![rng.gen_range(0..avail)]
        } else {
            vec![rng.gen_range(0..avail), rng.gen_range(0..avail)]
        };
        gates.push(Gate {
            name: format!("g{j}"),
            op,
            args,
        });
    }
    Circuit {
        inputs,
        gates,
        output: n + k - 1,
    }
}

/// Random formula with planar incidence graph, or `None` after a few
/// rejected draws.
pub fn random_planar_formula(rng: &mut ChaCha8Rng, max_vars: usize, max_clauses: usize) -> Option<Formula1in3> {
    for _ in 0..100 {
        let m = rng.gen_range(1..=max_clauses);
        let vars: Vec<usize> = (1..=max_vars).collect();
        let clauses: Vec<[usize; 3]> = (0..m)
            .map(|_| {
                let mut c: Vec<usize> = vars.choose_multiple(rng, 3).copied().collect();
                c.sort_unstable();
                [c[0], c[1], c[2]]
            })
            .collect();
        let f = Formula1in3::new(max_vars, clauses).ok()?;
        if embed_planar(&f).is_some() {
            return Some(f);
        }
    }
    None
}

/// Random formula on `n` variables in which every variable occurs exactly
/// three times and the incidence graph is planar.
pub fn random_cubic_planar_formula(rng: &mut ChaCha8Rng, n: usize) -> Option<Formula1in3> {
    for _ in 0..2000 {
        let mut slots: Vec<usize> = (1..=n).flat_map(|v| [v, v, v]).collect();
        slots.shuffle(rng);
        let clauses: Vec<[usize; 3]> = slots.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
        if clauses.iter().any(|c| c[0] == c[1] || c[1] == c[2] || c[0] == c[2]) {
            continue;
        }
        let f = Formula1in3::new(n, clauses).ok()?;
        if embed_planar(&f).is_some() {
            return Some(f);
        }
    }
    None
}

// ---------------------------------------------------------------------------
// acceptance checks

/// Settings for the acceptance checks; the defaults are the pinned values.
#[derive(Clone, Debug)]
pub struct SelftestConfig {
    pub seed: u64,
    pub budget: Budget,
    pub formula_nodes: Option<u64>,
    pub solver_samples: usize,
    pub parsimony_circuits: usize,
    pub reduction_formulas: usize,
    pub circuits_3d: usize,
    pub lift_regions: usize,
    /// Replaces the catalog, for negative controls.
    pub gadgets: Option<Vec<GadgetGeometry>>,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig {
            seed: 0x5eed,
            budget: Budget::nodes(200_000_000),
            formula_nodes: Some(20_000_000),
            solver_samples: 240,
            parsimony_circuits: 60,
            reduction_formulas: 24,
            circuits_3d: 24,
            lift_regions: 60,
            gadgets: None,
        }
    }
}

fn count_row(case: String, expected: &BigUint, region: &Region, tiles: &[TileShape], budget: Budget) -> ReportRow {
    match count_tilings_with(region, tiles, budget) {
        Ok(n) => ReportRow::compare(case, expected, n),
        Err(SolverError::BudgetExceeded(_)) => ReportRow::inconclusive(case, expected, "budget"),
        Err(e) => ReportRow::failed(case, expected, e),
    }
}

fn tile_names(tiles: &[TileShape]) -> String {
    tiles.iter().map(|t| t.name()).collect::<Vec<_>>().join("+")
}

/// The exact solver agrees with the reference oracle on random regions of up
/// to 16 cells in two and three dimensions, for every built-in tileset.
pub fn check_solver_agreement(cfg: &SelftestConfig) -> VerificationReport {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    for i in 0..cfg.solver_samples {
        let (dim, extent): (usize, &[i32]) = if i % 2 == 0 { (2, &[5, 5]) } else { (3, &[3, 3, 3]) };
        let region = random_region(&mut rng, dim, 16, extent);
        for tiles in builtin_tilesets(dim) {
            let expected = oracle_count(&region, &tiles).expect("matching dimension");
            let case = format!("sample{i}:d{dim}:{}cells:{}", region.len(), tile_names(&tiles));
            rows.push(count_row(case, &expected, &region, &tiles, cfg.budget));
        }
    }
    VerificationReport::new("solver-agreement", rows, started)
}

fn rectangle(w: i32, h: i32) -> Region {
    Region::from_cells(2, (0..h).flat_map(|y| (0..w).map(move |x| Cell::xy(x, y)))).expect("2D cells")
}

/// Small counts: right trominoes in a 2×3 box and dominoes in 2×n strips.
pub fn check_known_counts(cfg: &SelftestConfig) -> VerificationReport {
    let started = Instant::now();
    let mut rows = Vec::new();
    let trominoes = builtin_tileset("right_tromino").expect("built-in");
    let r = rectangle(3, 2);
    rows.push(ReportRow::compare("2x3:right_tromino:oracle", 2, oracle_count(&r, &trominoes).expect("2D")));
    rows.push(count_row("2x3:right_tromino".into(), &BigUint::from(2u32), &r, &trominoes, cfg.budget));
    let dominoes = builtin_tileset("domino2").expect("built-in");
    let (mut a, mut b) = (1u64, 2u64);
    for n in 1..=8 {
        let f = if n == 1 { a } else { b };
        let r = rectangle(n, 2);
        let oracle = oracle_count(&r, &dominoes).expect("2D");
        rows.push(ReportRow::compare(format!("2x{n}:domino2:oracle"), f, &oracle));
        rows.push(count_row(format!("2x{n}:domino2"), &oracle, &r, &dominoes, cfg.budget));
        if n >= 2 {
            (a, b) = (b, a + b);
        }
    }
    VerificationReport::new("known-counts", rows, started)
}

fn table_claim(g: &GadgetGeometry, rows: usize, tilings: u64, pred: impl Fn(&dyn Fn(&str) -> bool) -> bool) -> bool {
    let k = g.ports.len();
    let mut matched = 0;
    for mask in 0..(1u32 << k) {
        let values: Vec<bool> = (0..k).map(|i| mask >> i & 1 == 1).collect();
        let get = |name: &str| values[g.port_index(name).expect("named port")];
        let want = if pred(&get) { tilings } else { 0 };
        if g.expected(&values) != want {
            return false;
        }
        matched += usize::from(want > 0);
    }
    matched == rows
}

/// Declared tables against the behaviour each gadget is meant to have. The
/// declared tables are then measured by [`verify_gadget`].
pub fn gadget_claims(gadgets: &[GadgetGeometry]) -> Vec<ReportRow> {
    let find = |name: &str| gadgets.iter().find(|g| g.name == name);
    type Claim = (&'static str, usize, u64, fn(&dyn Fn(&str) -> bool) -> bool);
    let claims: [Claim; 12] = [
        ("and2d", 4, 1, |v| v("out") == (v("a") && v("b"))),
        ("not", 2, 1, |v| v("out") != v("in")),
        ("splitter", 2, 1, |v| v("o1") == v("in") && v("o2") == v("in")),
        ("variable_bulb", 2, 1, |_| true),
        ("terminator", 1, 1, |v| v("in")),
        ("variable_node", 2, 1, |v| v("o1") == v("o2") && v("o2") == v("o3")),
        ("clause_node", 3, 1, |v| [v("i1"), v("i2"), v("i3")].iter().filter(|&&b| b).count() == 1),
        ("gate3d", 4, 1, |v| v("out") == (v("a") && v("b"))),
        ("gate3d_or", 4, 1, |v| v("out") == (v("a") || v("b"))),
        ("pairing_wire", 2, 1, |v| v("a") != v("b")),
        ("dirty_splitter", 4, 1, |v| v("in") == (v("o1") || v("o2"))),
        ("terminator3d", 1, 1, |v| v("in")),
    ];
    let mut rows = Vec::new();
    for (name, n, t, pred) in claims {
        let observed = match find(name) {
            Some(g) => table_claim(g, n, t, pred),
            None => false,
        };
        rows.push(ReportRow::compare(format!("claim:{name}"), true, observed));
    }
    // the OR gate is the AND gate moved by one cell, so only the parity of
    // its centre differs
    let parity = match (find("gate3d"), find("gate3d_or")) {
        (Some(a), Some(o)) => {
            let z = Cell::xyz(0, 0, 1);
            a.region.translate(z) == o.region && a.ports.iter().zip(&o.ports).all(|(p, q)| p.start.add(z) == q.start)
        }
        _ => false,
    };
    rows.push(ReportRow::compare("claim:gate3d_parity_shift", true, parity));
    rows
}

/// Every catalog gadget matches its declared table exactly, and the declared
/// tables say what each gadget is for. Gadgets are verified concurrently and
/// merged by name.
pub fn check_gadget_suite(cfg: &SelftestConfig) -> VerificationReport {
    let started = Instant::now();
    let gadgets = cfg.gadgets.clone().unwrap_or_else(catalog);
    let mut reports: Vec<VerificationReport> = std::thread::scope(|s| {
        let handles: Vec<_> = gadgets
            .iter()
            .map(|g| s.spawn(move || verify_gadget(g, cfg.budget)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("verification thread")).collect()
    });
    reports.sort_by(|a, b| a.subject.cmp(&b.subject));
    let mut rows = gadget_claims(&gadgets);
    for r in reports {
        for row in r.rows {
            rows.push(ReportRow {
                case: format!("{}:{}", r.subject, row.case),
                ..row
            });
        }
    }
    VerificationReport::new("gadget-suite", rows, started)
}

/// Parsimony of the square-lattice circuit compiler on random circuits with
/// at most three inputs and three gates.
pub fn check_parsimony(cfg: &SelftestConfig) -> VerificationReport {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x2d);
    let mut rows = Vec::new();
    let fixed = [
        "input x\noutput x\n",
        "input x\ninput y\nand g x y\noutput g\n",
        "input x\nnot g x\noutput g\n",
    ];
    let fixed = fixed.iter().map(|t| parse_netlist(t).expect("fixed netlist"));
    let random: Vec<Circuit> = (0..cfg.parsimony_circuits).map(|_| random_circuit(&mut rng, 3, 3, true)).collect();
    for (i, c) in fixed.chain(random).enumerate() {
        let r = verify_parsimony(&c, cfg.budget);
        for row in r.rows {
            rows.push(ReportRow {
                case: format!("circuit{i}:{}", r.subject),
                ..row
            });
        }
    }
    VerificationReport::new("parsimony-2d", rows, started)
}

fn port_table(b: &Builder, ports: &[usize]) -> BTreeMap<Vec<bool>, usize> {
    let f = b.formula().expect("well-formed component");
    let mut t = BTreeMap::new();
    for m in brute_force_models(&f).expect("small component") {
        *t.entry(ports.iter().map(|&p| m[p - 1]).collect()).or_insert(0) += 1;
    }
    t
}

fn table_text(t: &BTreeMap<Vec<bool>, usize>) -> String {
    let parts: Vec<String> = t.iter().map(|(k, v)| format!("{}:{v}", bits(k))).collect();
    format!("{{{}}}", parts.join(","))
}

/// Exhaustive port tables of the reduction components: every assignment of
/// the internal variables is enumerated.
pub fn component_tables() -> Vec<ReportRow> {
    let mut rows = Vec::new();
    let vars = |b: &mut Builder, k: usize| -> Vec<usize> { (0..k).map(|i| b.named(format!("p{i}"))).collect() };
    let one_hot = |k: usize| -> BTreeMap<Vec<bool>, usize> {
        (0..k).map(|i| ((0..k).map(|j| j == i).collect(), 1)).collect()
    };

    let mut b = Builder::new();
    let p = vars(&mut b, 3);
    triangle(&mut b, p[0], p[1], p[2]);
    rows.push(ReportRow::compare("triangle", table_text(&one_hot(3)), table_text(&port_table(&b, &p))));

    let mut b = Builder::new();
    let p = vars(&mut b, 2);
    let ps = partial_switch(&mut b, p[0], p[1]);
    let (r, s) = (ps.port("r").expect("r"), ps.port("s").expect("s"));
    // p,q are copied onto r,s in either order; two trues are rejected
    let mut expect = BTreeMap::new();
    for (pv, qv) in [(false, false), (false, true), (true, false)] {
        expect.insert(vec![pv, qv, pv, qv], 1);
        expect.insert(vec![pv, qv, qv, pv], 1);
    }
    rows.push(ReportRow::compare(
        "partial_switch",
        table_text(&expect),
        table_text(&port_table(&b, &[p[0], p[1], r, s])),
    ));

    let mut b = Builder::new();
    let p = vars(&mut b, 3);
    three_way_verifier(&mut b, p[0], p[1], p[2]);
    let observed = port_table(&b, &p);
    let expect: BTreeMap<Vec<bool>, usize> = observed
        .keys()
        .filter(|k| k[0] == k[1] && k[1] == k[2])
        .map(|k| (k.clone(), observed[k]))
        .collect();
    let complete = expect.len() == 2 && expect.len() == observed.len();
    rows.push(ReportRow::compare("three_way_verifier:all_equal", true, complete));

    let mut b = Builder::new();
    let p = vars(&mut b, 2);
    let os = optional_switch(&mut b, p[0], p[1]);
    let (o1, o2) = (os.port("o1").expect("o1"), os.port("o2").expect("o2"));
    let f = b.formula().expect("well-formed component");
    let mut agree = true;
    for mask in 0..16u32 {
        let v: Vec<bool> = (0..4).map(|i| mask >> i & 1 == 1).collect();
        let fixed = [(p[0], v[0]), (p[1], v[1]), (o1, v[2]), (o2, v[3])];
        let sat = backtrack_with_fixed(&f, &fixed, SolveMode::Decide, None)
            .map(|r| r.satisfiable)
            .unwrap_or(false);
        let perm = (v[2], v[3]) == (v[0], v[1]) || (v[2], v[3]) == (v[1], v[0]);
        agree &= sat == perm;
    }
    rows.push(ReportRow::compare("optional_switch:permutations", true, agree));
    rows
}

/// Random planar formulas with at most four clauses over six variables are
/// reduced to cubic form and checked; the component tables are exhaustive.
pub fn check_reduction(cfg: &SelftestConfig) -> VerificationReport {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x43);
    let mut rows = component_tables();
    for i in 0..cfg.reduction_formulas {
        let Some(e) = random_planar_formula(&mut rng, 6, 4) else {
            rows.push(ReportRow::failed(format!("formula{i}"), "planar sample", "none"));
            continue;
        };
        let r = verify_reduction(&e, cfg.formula_nodes);
        for row in r.rows {
            rows.push(ReportRow {
                case: format!("formula{i}:{}:{}", r.subject, row.case),
                ..row
            });
        }
    }
    VerificationReport::new("cubic-reduction", rows, started)
}

/// Cubic planar instances used by the tromino-only compiler check.
pub fn cubic_corpus(seed: u64) -> Vec<Formula1in3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![Formula1in3::new(4, vec![[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]]).expect("valid")];
    // 3·trues = clauses = n, so only n = 6 can be satisfiable here
    for n in 4..=8 {
        for _ in 0..if n == 6 { 10 } else { 3 } {
            if let Some(f) = random_cubic_planar_formula(&mut rng, n) {
                if !out.contains(&f) {
                    out.push(f);
                }
            }
        }
    }
    out
}

/// Tromino-only compilation decides 1-in-3 satisfiability on cubic planar
/// instances with at most eight variables.
pub fn check_tromino_compile(cfg: &SelftestConfig) -> VerificationReport {
    let started = Instant::now();
    let mut rows = Vec::new();
    for (i, f) in cubic_corpus(cfg.seed ^ 0x13).iter().enumerate() {
        let sat = !brute_force_models(f).expect("small formula").is_empty();
        let case = format!("formula{i}:{}", formula_id(f));
        rows.push(match compile_1in3_2d(f) {
            Err(e) => ReportRow::failed(case, sat, format!("compile:{e}").replace(' ', "_")),
            Ok(inst) => match exists_tiling_with(&inst.region, &inst.family.tileset(), cfg.budget) {
                Ok(t) => ReportRow::compare(case, sat, t),
                Err(SolverError::BudgetExceeded(_)) => ReportRow::inconclusive(case, sat, "budget"),
                Err(e) => ReportRow::failed(case, sat, e),
            },
        });
    }
    VerificationReport::new("tromino-compile", rows, started)
}

/// Cubic-lattice compilation preserves satisfiability for circuits with at
/// most two gates, and the pairing wire reads opposite values at its ends.
pub fn check_compile_3d(cfg: &SelftestConfig) -> VerificationReport {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x3d);
    let mut rows = Vec::new();
    match gadget("pairing_wire") {
        Ok(g) => {
            let tiles = g.family.tileset();
            let mut total = BigUint::from(0u32);
            let mut opposite = BigUint::from(0u32);
            for (a, b) in [(false, false), (false, true), (true, false), (true, true)] {
                let region = forced_region(&g.region, &g.ports, &[a, b], 4).expect("stubs fit");
                let n = count_tilings(&region, &tiles).expect("3D tiles");
                if a != b {
                    opposite += &n;
                }
                total += n;
            }
            rows.push(ReportRow::compare("pairing_wire:tilings", 2, &total));
            rows.push(ReportRow::compare("pairing_wire:opposite_ends", 2, &opposite));
        }
        Err(e) => rows.push(ReportRow::failed("pairing_wire", "gadget", e)),
    }
    let fixed = [
        "input x\ninput y\nand g x y\noutput g\n",
        "input x\nnot n x\nand g x n\noutput g\n",
        "input x\ninput y\nor g x y\nnot h g\noutput h\n",
    ];
    let fixed = fixed.iter().map(|t| parse_netlist(t).expect("fixed netlist"));
    let random: Vec<Circuit> = (0..cfg.circuits_3d).map(|_| random_circuit(&mut rng, 3, 2, true)).collect();
    for (i, c) in fixed.chain(random).enumerate() {
        let mp = monotonize(&c);
        let sat = c.model_count().expect("small circuit") > 0;
        let case = format!("circuit{i}:{}", circuit_id(&c));
        rows.push(match compile_monotone_3d(&mp) {
            Err(e) => ReportRow::failed(case, sat, format!("compile:{e}").replace(' ', "_")),
            Ok(inst) => match exists_tiling_with(&inst.region, &inst.family.tileset(), cfg.budget) {
                Ok(t) => ReportRow::compare(case, sat, t),
                Err(SolverError::BudgetExceeded(_)) => ReportRow::inconclusive(case, sat, "budget"),
                Err(e) => ReportRow::failed(case, sat, e),
            },
        });
    }
    VerificationReport::new("compile-3d", rows, started)
}

/// Peg cells of a lifted region: those off the `w = 0` hyperplane.
fn pegs(lifted: &Region) -> Vec<Cell> {
    lifted.iter().filter(|c| c.w() != 0).copied().collect()
}

/// Lifting to four dimensions preserves the tiling count, and in every
/// tiling each peg shares a domino with the site below or above it.
pub fn check_lift_4d(cfg: &SelftestConfig) -> VerificationReport {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x4d);
    let t3 = builtin_tileset("domino3,straight_tromino3").expect("built-in");
    let t4 = builtin_tileset("domino4,straight_tromino4").expect("built-in");
    let mut rows = Vec::new();
    for i in 0..cfg.lift_regions {
        let r = random_region(&mut rng, 3, 10, &[3, 3, 2]);
        let case = format!("region{i}:{}cells", r.len());
        let lifted = match lift_4d(&r) {
            Ok(l) => l,
            Err(e) => {
                rows.push(ReportRow::failed(case, "lift", e));
                continue;
            }
        };
        let expected = oracle_count(&r, &t3).expect("3D tiles");
        rows.push(count_row(format!("{case}:count"), &expected, &lifted, &t4, cfg.budget));
        let limit = 10_000;
        let paired = match enumerate_tilings_with(&lifted, &t4, limit, cfg.budget) {
            Ok(en) if !en.truncated => {
                let pegs = pegs(&lifted);
                en.tilings.iter().all(|t| {
                    pegs.iter().all(|&peg| {
                        let site = peg.with(3, 0);
                        t.placements.iter().any(|p| {
                            let cells = p.cells(&t4).unwrap_or_default();
                            cells.len() == 2 && cells.contains(&peg) && cells.contains(&site)
                        })
                    })
                })
                .to_string()
            }
            Ok(_) => "truncated".into(),
            Err(e) => e.to_string().replace(' ', "_"),
        };
        let row = ReportRow::compare(format!("{case}:pegs_paired"), true, &paired);
        rows.push(if paired == "truncated" || paired.contains("budget") {
            ReportRow::inconclusive(row.case, true, paired)
        } else {
            row
        });
    }
    VerificationReport::new("lift-4d", rows, started)
}

/// Region and formula files survive parse and emit byte for byte.
pub fn check_round_trip(cfg: &SelftestConfig) -> VerificationReport {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x99);
    let mut rows = Vec::new();
    for i in 0..30 {
        let (dim, extent): (usize, &[i32]) = match i % 3 {
            0 => (2, &[6, 6]),
            1 => (3, &[4, 4, 4]),
            _ => (4, &[3, 3, 3, 3]),
        };
        let r = random_region(&mut rng, dim, 20, extent);
        let text = emit_region(&r);
        let again = parse_region(&text).map(|p| (emit_region(&p), p == r));
        rows.push(match again {
            Ok((t2, same)) => ReportRow::compare(format!("region{i}"), "identical", if t2 == text && same { "identical" } else { "changed" }),
            Err(e) => ReportRow::failed(format!("region{i}"), "identical", e.to_string().replace(' ', "_")),
        });
    }
    for i in 0..30 {
        let Some(mut f) = random_planar_formula(&mut rng, 6, 4) else {
            continue;
        };
        if i % 2 == 0 {
            f.embedding = embed_planar(&f).map(|e| e.rotation);
        }
        let text = emit_formula(&f);
        let again = parse_formula(&text).map(|p| (emit_formula(&p), p == f));
        rows.push(match again {
            Ok((t2, same)) => ReportRow::compare(format!("formula{i}"), "identical", if t2 == text && same { "identical" } else { "changed" }),
            Err(e) => ReportRow::failed(format!("formula{i}"), "identical", e.to_string().replace(' ', "_")),
        });
    }
    VerificationReport::new("round-trip", rows, started)
}

/// The acceptance checks in order.
pub fn acceptance_checks(cfg: &SelftestConfig) -> Vec<VerificationReport> {
    vec![
        check_solver_agreement(cfg),
        check_known_counts(cfg),
        check_gadget_suite(cfg),
        check_parsimony(cfg),
        check_reduction(cfg),
        check_tromino_compile(cfg),
        check_compile_3d(cfg),
        check_lift_4d(cfg),
        check_round_trip(cfg),
    ]
}

/// One row per check, passing only when the check passed.
pub fn summarize(checks: &[VerificationReport]) -> VerificationReport {
    let started = Instant::now();
    let rows = checks
        .iter()
        .map(|r| {
            let bad = r.problems().count();
            ReportRow {
                case: r.subject.clone(),
                expected: format!("{}/{}", r.rows.len(), r.rows.len()),
                observed: format!("{}/{}", r.rows.len() - bad, r.rows.len()),
                status: r.verdict,
            }
        })
        .collect();
    VerificationReport::new("selftest", rows, started)
}

/// Runs every acceptance check; one row per check.
pub fn selftest(cfg: &SelftestConfig) -> VerificationReport {
    summarize(&acceptance_checks(cfg))
}

/// ASCII picture of a planar tiling, top row first; adjacent tiles get
/// different letters and cells outside the region are dots. `None` for
/// other dimensions.
pub fn render_tiling(region: &Region, tiles: &[TileShape], tiling: &Tiling) -> Option<String> {
    if region.dim() != 2 {
        return None;
    }
    let (lo, hi) = region.bounds()?;
    const GLYPHS: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
    let mut owner: BTreeMap<Cell, usize> = BTreeMap::new();
    for (i, p) in tiling.placements.iter().enumerate() {
        for c in p.cells(tiles)? {
            owner.insert(c, i);
        }
    }
    let mut glyph: Vec<u8> = Vec::with_capacity(tiling.placements.len());
    for (i, p) in tiling.placements.iter().enumerate() {
        let taken: BTreeSet<u8> = p
            .cells(tiles)?
            .iter()
            .flat_map(|c| c.neighbors())
            .filter_map(|n| owner.get(&n))
            .filter(|&&j| j < i)
            .map(|&j| glyph[j])
            .collect();
        let g = GLYPHS.iter().copied().find(|g| !taken.contains(g)).unwrap_or(b'?');
        glyph.push(g);
    }
    let mut out = String::new();
    for y in (lo.y()..=hi.y()).rev() {
        for x in lo.x()..=hi.x() {
            let c = Cell::xy(x, y);
            out.push(match owner.get(&c) {
                Some(&i) => glyph[i] as char,
                None if region.contains(&c) => '#',
                None => '.',
            });
        }
        out.push('\n');
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::gadget::TruthRow;

    #[test]
    fn and_gadget_rows() {
        let r = verify_gadget(&gadget("and2d").unwrap(), Budget::UNLIMITED);
        assert!(r.passed(), "{r}");
        let ones: Vec<&str> = r.rows.iter().filter(|x| x.observed == "1").map(|x| x.case.as_str()).collect();
        assert_eq!(ones.len(), 4);
    }

    #[test]
    fn corrupted_table_fails() {
        let mut g = gadget("not").unwrap();
        g.truth_table.push(TruthRow {
            values: vec![true, true],
            tilings: 1,
        });
        let r = verify_gadget(&g, Budget::UNLIMITED);
        assert_eq!(r.verdict, Verdict::Fail);
        let cfg = SelftestConfig {
            gadgets: Some(vec![g]),
            ..SelftestConfig::default()
        };
        assert_eq!(check_gadget_suite(&cfg).verdict, Verdict::Fail);
    }

    #[test]
    fn starved_budget_is_inconclusive() {
        let r = verify_gadget(&gadget("clause_node").unwrap(), Budget::nodes(3));
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert_eq!(r.verdict.exit_code(), 3);
    }

    #[test]
    fn parsimony_examples() {
        for text in ["input x\ninput y\nand g x y\noutput g\n", "input x\noutput x\n", "input x\nnot g x\noutput g\n"] {
            let c = parse_netlist(text).unwrap();
            let r = verify_parsimony(&c, Budget::UNLIMITED);
            assert!(r.passed(), "{r}");
            assert_eq!(r.rows[0].observed, "1");
        }
    }

    #[test]
    fn reduction_examples() {
        let sat = Formula1in3::new(3, vec![[1, 2, 3]]).unwrap();
        assert!(verify_reduction(&sat, Some(5_000_000)).passed());
        // every variable occurs three times in four clauses: 3t = 4 has no solution
        let unsat = Formula1in3::new(4, vec![[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]]).unwrap();
        let r = verify_reduction(&unsat, Some(5_000_000));
        assert!(r.passed(), "{r}");
        assert!(r.rows.iter().any(|x| x.case == "satisfiable" && x.observed == "false"));
    }

    #[test]
    fn reports_are_deterministic() {
        let g = gadget("splitter").unwrap();
        let a = verify_gadget(&g, Budget::UNLIMITED);
        let b = verify_gadget(&g, Budget::UNLIMITED);
        assert_eq!(a.to_string(), b.to_string());
        let cfg = SelftestConfig::default();
        assert_eq!(check_known_counts(&cfg).to_string(), check_known_counts(&cfg).to_string());
    }

    #[test]
    fn renders_tromino_pair() {
        let tiles = builtin_tileset("right_tromino").unwrap();
        let r = rectangle(3, 2);
        let en = crate::solver::enumerate_tilings(&r, &tiles, 10).unwrap();
        let pic = render_tiling(&r, &tiles, &en.tilings[0]).unwrap();
        assert_eq!(pic.lines().count(), 2);
        assert_eq!(pic.chars().filter(|&c| c == 'A').count(), 3);
        assert_eq!(pic.chars().filter(|&c| c == 'B').count(), 3);
    }

    #[test]
    fn component_tables_hold() {
        for row in component_tables() {
            assert_eq!(row.status, Verdict::Pass, "{row:?}");
        }
    }

    #[test]
    fn claims_hold_for_catalog() {
        for row in gadget_claims(&catalog()) {
            assert_eq!(row.status, Verdict::Pass, "{row:?}");
        }
    }

    #[test]
    fn cubic_corpus_is_cubic_and_planar() {
        let corpus = cubic_corpus(1);
        assert!(corpus.len() >= 6);
        for f in corpus {
            assert!(f.num_vars <= 8);
            assert!(occurrence_counts(&f).is_cubic);
            assert!(embed_planar(&f).is_some());
        }
    }
}
