//! Acceptance criteria, one printed line each. Run with `--nocapture` to
//! see the lines; the test fails if any criterion fails.

use std::time::Duration;

use tilework::harness::*;

/// Pinned limits.
const SOLVER_SAMPLES_MIN: usize = 200;
const SOLVER_TIME_LIMIT: Duration = Duration::from_secs(60);
const GADGET_TIME_LIMIT: Duration = Duration::from_secs(300);
const PARSIMONY_CIRCUITS_MIN: usize = 50;
const REDUCTION_FORMULAS_MIN: usize = 20;
const LIFT_REGIONS_MIN: usize = 50;
/// Counts and truth values are compared exactly: no tolerance.
const COUNT_TOLERANCE: u64 = 0;

struct Line {
    id: usize,
    title: &'static str,
    ok: bool,
    detail: String,
}

fn line(id: usize, title: &'static str, r: &VerificationReport, extra: Option<(bool, String)>) -> Line {
    let bad = r.problems().count();
    let (extra_ok, extra_text) = extra.unwrap_or((true, String::new()));
    let mut detail = format!(
        "{} rows, {} not passing, tolerance {}, {:.2?}",
        r.rows.len(),
        bad,
        COUNT_TOLERANCE,
        r.stats.elapsed
    );
    if !extra_text.is_empty() {
        detail.push_str(", ");
        detail.push_str(&extra_text);
    }
    if let Some(first) = r.problems().next() {
        detail.push_str(&format!(
            "; first problem {} expected {} observed {}",
            first.case, first.expected, first.observed
        ));
    }
    Line {
        id,
        title,
        ok: r.passed() && extra_ok,
        detail,
    }
}

/// Number of distinct case names, a case name being the first `depth`
/// colon-separated fields of a row.
fn distinct_cases(r: &VerificationReport, prefix: &str, depth: usize) -> usize {
    let mut seen: Vec<String> = r
        .rows
        .iter()
        .filter(|row| row.case.starts_with(prefix))
        .map(|row| row.case.split(':').take(depth).collect::<Vec<_>>().join(":"))
        .collect();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

#[test]
fn acceptance_criteria() {
    let cfg = SelftestConfig::default();
    let mut lines = Vec::new();

    let r = check_solver_agreement(&cfg);
    let samples = distinct_cases(&r, "sample", 1);
    lines.push(line(
        1,
        "solver agrees with oracle",
        &r,
        Some((
            samples >= SOLVER_SAMPLES_MIN && r.stats.elapsed <= SOLVER_TIME_LIMIT,
            format!("{samples} regions (min {SOLVER_SAMPLES_MIN}), limit {SOLVER_TIME_LIMIT:?}"),
        )),
    ));

    let r = check_known_counts(&cfg);
    lines.push(line(2, "known small counts", &r, None));

    let r = check_gadget_suite(&cfg);
    let gadgets = distinct_cases(&r, "gadget:", 2);
    lines.push(line(
        3,
        "gadget suite",
        &r,
        Some((
            r.stats.elapsed <= GADGET_TIME_LIMIT,
            format!("{gadgets} gadgets, limit {GADGET_TIME_LIMIT:?}"),
        )),
    ));

    let r = check_parsimony(&cfg);
    let circuits = distinct_cases(&r, "circuit", 1);
    lines.push(line(
        4,
        "square-lattice compilation is parsimonious",
        &r,
        Some((
            circuits >= PARSIMONY_CIRCUITS_MIN,
            format!("{circuits} circuits (min {PARSIMONY_CIRCUITS_MIN})"),
        )),
    ));

    let r = check_reduction(&cfg);
    let formulas = distinct_cases(&r, "formula", 1);
    lines.push(line(
        5,
        "cubic reduction",
        &r,
        Some((
            formulas >= REDUCTION_FORMULAS_MIN,
            format!("{formulas} formulas (min {REDUCTION_FORMULAS_MIN})"),
        )),
    ));

    let r = check_tromino_compile(&cfg);
    let formulas = distinct_cases(&r, "formula", 1);
    lines.push(line(
        6,
        "tromino-only compilation decides 1-in-3",
        &r,
        Some((formulas > 0, format!("{formulas} cubic formulas"))),
    ));

    let r = check_compile_3d(&cfg);
    let circuits = distinct_cases(&r, "circuit", 1);
    lines.push(line(
        7,
        "cubic-lattice compilation",
        &r,
        Some((circuits > 0, format!("{circuits} circuits"))),
    ));

    let r = check_lift_4d(&cfg);
    let regions = distinct_cases(&r, "region", 1);
    lines.push(line(
        8,
        "four-dimensional lift",
        &r,
        Some((
            regions >= LIFT_REGIONS_MIN,
            format!("{regions} regions (min {LIFT_REGIONS_MIN})"),
        )),
    ));

    let r = check_round_trip(&cfg);
    lines.push(line(9, "file formats round-trip", &r, None));

    for l in &lines {
        println!(
            "criterion {} {}: {} ({})",
            l.id,
            l.title,
            if l.ok { "PASS" } else { "FAIL" },
            l.detail
        );
    }
    let failed: Vec<usize> = lines.iter().filter(|l| !l.ok).map(|l| l.id).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
