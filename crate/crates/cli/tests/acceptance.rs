//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_3;
use std::process::ExitCode;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use cuplength::cohomology::{compute_barcode, validate_family, AnnotatedBarcode};
use cuplength::fixtures::{self, random_filtration};
use cuplength::invariants::{analytic_vr_circle, analytic_vr_torus, analytic_vr_wedge_lower, is_eroded};
use cuplength::oracle::{cohomology_basis, oracle_cup_function};
use cuplength::{
    build_vietoris_rips, cup_diagram, erosion_distance, reconstruct, Cochain, CupDiagram, CupDiagramOptions,
    CupFunction, FilteredComplex, Interval,
};
use cuplength_cli::job::grid_mismatches;
use cuplength_cli::json::diagram_to_string;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

/// Every function built by the suite, for the monotonicity criterion.
static FUNCTIONS: Mutex<Vec<(String, CupFunction)>> = Mutex::new(Vec::new());

fn keep(label: impl Into<String>, f: &CupFunction) {
    FUNCTIONS.lock().unwrap().push((label.into(), f.clone()));
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn klein_diagram() -> CupDiagram {
    CupDiagram::from_points([
        (Interval::closed_open(1.0, 3.0), 1),
        (Interval::closed_open(2.0, 3.0), 2),
        (Interval::closed_open(2.0, f64::INFINITY), 2),
    ])
}

/// Three regimes of the Klein example: value 2 once the left end reaches 2,
/// value 1 for left ends in `[1, 2)` with right end below 3, zero otherwise.
fn klein_expected(a: f64, b: f64) -> u32 {
    if a >= 2.0 {
        2
    } else if a >= 1.0 && b < 3.0 {
        1
    } else {
        0
    }
}

fn reconstruction() -> Outcome {
    let start = Instant::now();
    let f = reconstruct(&klein_diagram());
    keep("klein diagram", &f);
    let grid: Vec<f64> = (0..50).map(|i| 5.0 * i as f64 / 49.0).collect();
    let mut checked = 0;
    for (i, &a) in grid.iter().enumerate() {
        for &b in &grid[i..] {
            let (got, want) = (f.at(a, b), klein_expected(a, b));
            ensure(got == want, || format!("f([{a}, {b}]) = {got}, expected {want}"))?;
            checked += 1;
        }
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("{checked} grid intervals"))
}

struct Case {
    label: String,
    complex: FilteredComplex,
    k: usize,
}

fn corpus() -> Vec<Case> {
    let named = [
        ("hollow triangle", fixtures::hollow_triangle()),
        ("filled triangle", fixtures::filled_triangle()),
        ("two disks", fixtures::two_disks()),
        ("square VR", fixtures::square_vr(2)),
        ("RP2", fixtures::rp2()),
        ("torus", fixtures::torus7()),
    ];
    let mut cases: Vec<Case> = named
        .into_iter()
        .map(|(label, c)| Case {
            label: label.to_string(),
            complex: c.truncate(3),
            k: 2,
        })
        .collect();
    for seed in 0..100 {
        let (complex, k) = random_filtration(seed);
        cases.push(Case {
            label: format!("random seed {seed}"),
            complex,
            k,
        });
    }
    cases
}

fn oracle_equivalence(cases: &[Case]) -> Outcome {
    let start = Instant::now();
    let mut intervals = 0;
    for case in cases {
        let b = compute_barcode(&case.complex, case.k);
        let (d, _) = cup_diagram(&b, &case.complex, case.k, CupDiagramOptions::default());
        let f = reconstruct(&d);
        let g = oracle_cup_function(&case.complex, case.k);
        keep(format!("{} (pipeline)", case.label), &f);
        keep(format!("{} (oracle)", case.label), &g);
        let (checked, bad) = grid_mismatches(&case.complex, &f, &g);
        if let Some((q, x, y)) = bad.first() {
            return Err(format!("{}: {q} gives {x}, oracle {y}", case.label));
        }
        intervals += checked;
    }
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!("{} complexes, {intervals} intervals, {:.2?}", cases.len(), start.elapsed()))
}

fn intervals_of(b: &AnnotatedBarcode, dim: usize) -> Vec<Interval> {
    b.in_dim(dim).map(|bar| bar.interval()).collect()
}

fn klein() -> Outcome {
    let c = fixtures::klein().truncate(3);
    let b = compute_barcode(&c, 2);
    let report = validate_family(&b, &c);
    ensure(report.passed(), || format!("representative family invalid: {:?}", report.failure))?;
    let betti: Vec<Vec<usize>> = c.critical_values().iter().map(|&t| cohomology_basis(&c, t, 2).dims()).collect();
    let expected_betti = vec![vec![1, 0, 0], vec![1, 1, 0], vec![1, 2, 1], vec![1, 1, 1]];
    ensure(betti == expected_betti, || format!("Betti numbers {betti:?}"))?;
    let b1 = intervals_of(&b, 1);
    let b2 = intervals_of(&b, 2);
    let want_b1 = vec![Interval::closed_open(1.0, 3.0), Interval::closed_open(2.0, f64::INFINITY)];
    let want_b2 = vec![Interval::closed_open(2.0, f64::INFINITY)];
    ensure(b1 == want_b1, || format!("B1 = {b1:?}"))?;
    ensure(b2 == want_b2, || format!("B2 = {b2:?}"))?;
    let (d, _) = cup_diagram(&b, &c, 2, CupDiagramOptions::default());
    keep("klein pipeline", &reconstruct(&d));
    ensure(d == klein_diagram(), || format!("diagram {}", diagram_to_string(&d)))?;
    Ok("B1 = {[1,3), [2,∞)}, B2 = {[2,∞)}, three diagram points".into())
}

fn analytic_erosion() -> Outcome {
    let start = Instant::now();
    let (f, g) = (analytic_vr_torus(8), analytic_vr_wedge_lower());
    keep("torus preset", &f);
    keep("wedge preset", &g);
    keep("circle preset", &analytic_vr_circle(8));
    let d = erosion_distance(&f, &g);
    ensure((d - FRAC_PI_3).abs() < 1e-9, || format!("distance {d}"))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("distance {d}"))
}

const STEP: f64 = 0.25;

fn random_function(rng: &mut ChaCha8Rng) -> CupFunction {
    let n = rng.gen_range(1..=4);
    CupFunction::new((0..n).map(|_| {
        let l = rng.gen_range(0..6) as f64 + if rng.gen_bool(0.2) { 0.5 } else { 0.0 };
        let r = l + rng.gen_range(1..=4) as f64;
        let (lc, rc) = (rng.gen_bool(0.8), rng.gen_bool(0.3));
        (Interval::new(l, r, lc, rc).unwrap(), rng.gen_range(1..=3))
    }))
}

/// Smallest multiple of `STEP` at which both functions dominate each other
/// after expansion, over closed queries on a grid of a quarter step.
fn grid_erosion(f: &CupFunction, g: &CupFunction) -> f64 {
    let pts: Vec<f64> = (-8..=200).map(|i| i as f64 * STEP / 4.0).collect();
    let holds = |eps: f64| {
        pts.iter().enumerate().all(|(i, &a)| {
            pts[i..]
                .iter()
                .all(|&b| f.at(a, b) >= g.at(a - eps, b + eps) && g.at(a, b) >= f.at(a - eps, b + eps))
        })
    };
    (0..=40).map(|i| i as f64 * STEP).find(|&e| holds(e)).unwrap_or(f64::INFINITY)
}

fn erosion_metric() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let fs = [random_function(&mut rng), random_function(&mut rng), random_function(&mut rng)];
        for (i, f) in fs.iter().enumerate() {
            keep(format!("erosion case {case}.{i}"), f);
        }
        let [f, g, h] = &fs;
        let d = erosion_distance(f, g);
        let brute = grid_erosion(f, g);
        worst = worst.max((d - brute).abs());
        ensure((d - brute).abs() <= STEP, || format!("case {case}: exact {d}, grid {brute}"))?;
        ensure(is_eroded(f, g, d + 1e-9) && is_eroded(g, f, d + 1e-9), || {
            format!("case {case}: not eroded just above {d}")
        })?;
        ensure(d == erosion_distance(g, f), || format!("case {case}: asymmetric"))?;
        let (fh, gh) = (erosion_distance(f, h), erosion_distance(g, h));
        ensure(fh <= d + gh, || format!("case {case}: triangle {fh} > {d} + {gh}"))?;
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("200 cases, max grid gap {worst}"))
}

fn overlap_at_critical(c: &FilteredComplex, x: &Interval, y: &Interval) -> bool {
    c.critical_values().iter().any(|&t| x.contains_point(t) && y.contains_point(t))
}

fn representative_family(cases: &[Case]) -> Outcome {
    let (mut zeroed, mut duplicated) = (0, 0);
    for case in cases {
        let c = &case.complex;
        let b = compute_barcode(c, case.k);
        let report = validate_family(&b, c);
        ensure(report.passed(), || format!("{}: {:?}", case.label, report.failure))?;
        let bars = b.bars();
        if let Some(bar) = bars.first() {
            let mutated = b.with_representative(0, Cochain::zero(bar.dim));
            ensure(!validate_family(&mutated, c).passed(), || {
                format!("{}: zeroed representative accepted", case.label)
            })?;
            zeroed += 1;
        }
        let pair = (0..bars.len()).flat_map(|i| (0..bars.len()).map(move |j| (i, j))).find(|&(i, j)| {
            i != j && bars[i].dim == bars[j].dim && overlap_at_critical(c, &bars[i].interval(), &bars[j].interval())
        });
        if let Some((i, j)) = pair {
            let mutated = b.with_representative(j, bars[i].representative.clone());
            ensure(!validate_family(&mutated, c).passed(), || {
                format!("{}: duplicated representative accepted", case.label)
            })?;
            duplicated += 1;
        }
    }
    ensure(zeroed > 50 && duplicated > 10, || format!("too few mutations: {zeroed} zeroed, {duplicated} duplicated"))?;
    Ok(format!("{} barcodes valid; {zeroed} zeroed and {duplicated} duplicated mutants rejected", cases.len()))
}

/// Closed, open and half-open intervals between grid points, plus rays.
fn query_intervals(f: &CupFunction) -> Vec<Interval> {
    let ends = f.endpoints();
    let mut pts: Vec<f64> = ends.clone();
    pts.extend(ends.windows(2).map(|w| (w[0] + w[1]) / 2.0));
    if let (Some(&lo), Some(&hi)) = (ends.first(), ends.last()) {
        pts.extend([lo - 1.0, hi + 1.0]);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut out = Vec::new();
    for (i, &a) in pts.iter().enumerate() {
        out.push(Interval::closed(a, a));
        out.push(Interval::closed_open(a, f64::INFINITY));
        out.push(Interval::open(a, f64::INFINITY));
        for &b in &pts[i + 1..] {
            for (lc, rc) in [(true, true), (true, false), (false, true), (false, false)] {
                out.push(Interval::new(a, b, lc, rc).unwrap());
            }
        }
    }
    out
}

fn monotonicity() -> Outcome {
    let functions = FUNCTIONS.lock().unwrap();
    let mut pairs = 0usize;
    for (label, f) in functions.iter() {
        let queries = query_intervals(f);
        let values: Vec<u32> = queries.iter().map(|q| f.evaluate(q)).collect();
        for (i, inner) in queries.iter().enumerate() {
            for (j, outer) in queries.iter().enumerate() {
                if outer.contains(inner) {
                    pairs += 1;
                    ensure(values[i] >= values[j], || format!("{label}: f({inner}) < f({outer})"))?;
                }
            }
        }
    }
    ensure(functions.len() > 500, || format!("only {} functions collected", functions.len()))?;
    Ok(format!("{} functions, {pairs} nested pairs", functions.len()))
}

fn performance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    let pts: Vec<(f64, f64)> = (0..30).map(|_| (rng.gen(), rng.gen())).collect();
    let d: Vec<Vec<f64>> = pts
        .iter()
        .map(|a| pts.iter().map(|b| (a.0 - b.0).hypot(a.1 - b.1)).collect())
        .collect();
    let diameter = d.iter().flatten().copied().fold(0.0, f64::max);
    let start = Instant::now();
    let c = build_vietoris_rips(&d, 3, diameter).map_err(|e| e.to_string())?;
    let b = compute_barcode(&c, 2);
    let (diagram, stats) = cup_diagram(&b, &c, 2, CupDiagramOptions::default());
    let elapsed = start.elapsed();
    keep("random VR", &reconstruct(&diagram));
    within(elapsed, Duration::from_secs(60))?;
    ensure(stats.q_1 <= stats.m_k, || format!("q1 = {} > m_k = {}", stats.q_1, stats.m_k))?;
    let distinct: BTreeSet<(Interval, &Cochain)> =
        b.bars().iter().map(|bar| (bar.interval(), &bar.representative)).collect();
    ensure(stats.q_1 == distinct.len(), || format!("q1 = {}, distinct bars {}", stats.q_1, distinct.len()))?;
    ensure(stats.q_ell.first() == Some(&stats.q_1), || format!("q_ell = {:?}", stats.q_ell))?;
    ensure(stats.q_ell.len() <= 2, || format!("q_ell = {:?} has more than k entries", stats.q_ell))?;
    let max_value = diagram.iter().map(|(_, &v)| v as usize).max().unwrap_or(0);
    ensure(max_value <= stats.q_ell.len(), || format!("value {max_value} without a product level"))?;
    let level_two = diagram.iter().filter(|(_, &v)| v == 2).count();
    if let Some(&q2) = stats.q_ell.get(1) {
        ensure(level_two <= q2, || format!("{level_two} points of value 2 from {q2} products"))?;
    }
    Ok(format!(
        "{} simplices, {elapsed:.2?}, m_k = {}, q_ell = {:?}, {} products",
        c.len(),
        stats.m_k,
        stats.q_ell,
        stats.product_count
    ))
}

fn determinism() -> Outcome {
    let mut named: Vec<(String, FilteredComplex)> = vec![
        ("hollow triangle".into(), fixtures::hollow_triangle()),
        ("filled triangle".into(), fixtures::filled_triangle()),
        ("two disks".into(), fixtures::two_disks()),
        ("square VR".into(), fixtures::square_vr(2)),
        ("RP2".into(), fixtures::rp2()),
        ("torus".into(), fixtures::torus7()),
        ("klein".into(), fixtures::klein()),
    ];
    named.extend((0..20).map(|s| (format!("random seed {s}"), random_filtration(s).0)));
    for (label, c) in &named {
        let c = c.truncate(3);
        let b = compute_barcode(&c, 2);
        let (serial, _) = cup_diagram(&b, &c, 2, CupDiagramOptions::serial());
        for threads in [None, Some(2), Some(4)] {
            let opts = CupDiagramOptions {
                threads,
                ..CupDiagramOptions::default()
            };
            let (parallel, _) = cup_diagram(&b, &c, 2, opts);
            ensure(diagram_to_string(&serial) == diagram_to_string(&parallel), || {
                format!("{label}: serial and parallel JSON differ with {threads:?} threads")
            })?;
        }
    }
    Ok(format!("{} complexes", named.len()))
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let cases = corpus();
    let criteria: Vec<Criterion> = vec![
        ("reconstruction of the Klein diagram", Box::new(reconstruction)),
        ("oracle equivalence on fixtures and random filtrations", Box::new(|| oracle_equivalence(&cases))),
        ("Klein bottle fixture", Box::new(klein)),
        ("analytic erosion distance", Box::new(analytic_erosion)),
        ("erosion metric properties", Box::new(erosion_metric)),
        ("representative families", Box::new(|| representative_family(&cases))),
        ("monotonicity", Box::new(monotonicity)),
        ("performance smoke", Box::new(performance)),
        ("determinism", Box::new(determinism)),
    ];
    // Monotonicity consumes functions from every other criterion.
    let order = [0, 1, 2, 3, 4, 5, 7, 8, 6];
    let mut results = vec![None; criteria.len()];
    for &i in &order {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| criteria[i].1()))
            .unwrap_or_else(|_| Err("panicked".into()));
        results[i] = Some((outcome, start.elapsed()));
    }
    let mut failed = 0;
    for (i, ((name, _), result)) in criteria.iter().zip(results).enumerate() {
        let (outcome, elapsed) = result.unwrap();
        match outcome {
            Ok(detail) => println!("PASS  {}. {name}: {detail} [{elapsed:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {}. {name}: {why} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
