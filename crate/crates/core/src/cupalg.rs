//! Cup products of cochains and the persistent cup-length diagram.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use smallvec::SmallVec;

use crate::cohomology::{AnnotatedBarcode, Death};
use crate::complex::{Cochain, FilteredComplex, Simplex, Vertex};
use crate::invariants::Interval;
use crate::z2linalg::ReducedCoboundary;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "CUPLENGTH_THREADS";

/// Cochain-level cup product. Terms whose concatenated simplex is missing
/// from `c` vanish.
pub fn cup_product(s1: &Cochain, s2: &Cochain, c: &FilteredComplex) -> Cochain {
    let dim = s1.dim() + s2.dim();
    let mut out = Cochain::zero(dim);
    if dim > c.dim() || s1.is_zero() || s2.is_zero() {
        return out;
    }
    let mut by_first: HashMap<Vertex, Vec<&Simplex>> = HashMap::new();
    for b in s2.summands() {
        by_first.entry(b.first()).or_default().push(b);
    }
    let mut buf: SmallVec<[Vertex; 8]> = SmallVec::new();
    for a in s1.summands() {
        let Some(bs) = by_first.get(&a.last()) else { continue };
        for b in bs {
            buf.clear();
            buf.extend_from_slice(a.vertices());
            buf.extend_from_slice(&b.vertices()[1..]);
            let s = Simplex::from_sorted(&buf);
            if c.contains(&s) {
                out.toggle(s);
            }
        }
    }
    out
}

/// Persistent cup-length diagram: intervals with their largest product
/// length. Intervals of value zero are absent.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CupDiagram {
    points: BTreeMap<Interval, u32>,
}

impl CupDiagram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_points(points: impl IntoIterator<Item = (Interval, u32)>) -> Self {
        let mut d = CupDiagram::new();
        for (i, v) in points {
            d.record(i, v);
        }
        d
    }

    /// Records `value` at `interval`, keeping the larger of old and new.
    pub fn record(&mut self, interval: Interval, value: u32) {
        if value == 0 {
            return;
        }
        let slot = self.points.entry(interval).or_insert(value);
        *slot = (*slot).max(value);
    }

    pub fn get(&self, interval: &Interval) -> Option<u32> {
        self.points.get(interval).copied()
    }

    pub fn points(&self) -> &BTreeMap<Interval, u32> {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Interval, &u32)> {
        self.points.iter()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunStats {
    /// Number of positive-dimensional simplices.
    pub m_k: usize,
    /// Number of bars entering the products.
    pub q_1: usize,
    /// `q_ell[l - 1]` is the number of distinct `l`-fold products with
    /// non-empty support.
    pub q_ell: Vec<usize>,
    pub product_count: usize,
    pub coboundary_test_count: usize,
}

impl RunStats {
    pub fn q_max(&self) -> usize {
        self.q_ell.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CupDiagramOptions {
    /// Bars shorter than this are dropped before forming products.
    pub trim_eps: f64,
    /// Evaluate the product pairs on a thread pool.
    pub parallel: bool,
    /// Worker thread cap; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for CupDiagramOptions {
    fn default() -> Self {
        CupDiagramOptions {
            trim_eps: 0.0,
            parallel: true,
            threads: None,
        }
    }
}

impl CupDiagramOptions {
    pub fn serial() -> Self {
        CupDiagramOptions {
            parallel: false,
            ..Self::default()
        }
    }

    /// Default options with the thread cap taken from `CUPLENGTH_THREADS`.
    pub fn from_env() -> Self {
        let threads = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n > 0);
        CupDiagramOptions {
            parallel: threads != Some(1),
            threads,
            ..Self::default()
        }
    }

    pub fn with_trim(mut self, trim_eps: f64) -> Self {
        self.trim_eps = trim_eps;
        self
    }
}

/// Where a product lives on the critical grid.
struct SupportSearch<'a> {
    c: &'a FilteredComplex,
    rc: &'a ReducedCoboundary,
    births: &'a [f64],
}

impl SupportSearch<'_> {
    /// The grid value used in place of an open right end.
    fn closed_right(&self, death: Death) -> Option<f64> {
        match death {
            Death::Finite(x) => self.c.critical_before(x),
            Death::Infinite => self.c.critical_values().last().copied(),
        }
    }

    fn nonzero_at(&self, sigma: &Cochain, t: f64, tests: &mut usize) -> bool {
        *tests += 1;
        let restricted = sigma.restrict(self.c, t);
        if restricted.is_zero() {
            return false;
        }
        let pos = self
            .rc
            .positions(&restricted, t, self.c)
            .expect("restricted summands are alive and indexed");
        !self.rc.is_coboundary_at_block(&pos, self.rc.basis().block_start(t))
    }

    /// Left end of the support of `sigma` inside `[lower, death)`, if any.
    /// `sigma` must already be restricted to the closed-right end.
    fn left_end(&self, sigma: &Cochain, lower: f64, death: Death, tests: &mut usize) -> Option<f64> {
        let d = self.closed_right(death)?;
        if lower > d || !self.nonzero_at(sigma, d, tests) {
            return None;
        }
        let top = self.births.partition_point(|&b| b <= d);
        let mut left = None;
        for &b in self.births[..top].iter().rev() {
            if b < lower || !self.nonzero_at(sigma, b, tests) {
                break;
            }
            left = Some(b);
        }
        if left.is_some() {
            return left;
        }
        // The support always starts at a birth when the factors form a
        // representative family; otherwise scan the grid upwards.
        let cv = self.c.critical_values();
        let from = cv.partition_point(|&t| t < lower);
        cv[from..]
            .iter()
            .copied()
            .take_while(|&t| t <= d)
            .find(|&t| self.nonzero_at(sigma, t, tests))
    }
}

/// Support of a product of representatives whose bars are
/// `factor_intervals` (closed-open), reported closed-open.
pub fn support(
    sigma: &Cochain,
    factor_intervals: &[Interval],
    rc: &ReducedCoboundary,
    c: &FilteredComplex,
    birth_grid: &[f64],
) -> Option<Interval> {
    let lower = factor_intervals.iter().map(Interval::left).fold(f64::NEG_INFINITY, f64::max);
    let right = factor_intervals.iter().map(Interval::right).fold(f64::INFINITY, f64::min);
    let death = if right.is_finite() { Death::Finite(right) } else { Death::Infinite };
    let search = SupportSearch { c, rc, births: birth_grid };
    let d = search.closed_right(death)?;
    let sigma = sigma.restrict(c, d);
    let mut tests = 0;
    search
        .left_end(&sigma, lower, death, &mut tests)
        .map(|b| Interval::closed_open(b, right))
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Product {
    interval: Interval,
    death: Death,
    cochain: Cochain,
}

/// Runs the cup-length diagram algorithm on a barcode of `c`, which must be
/// the `(k + 1)`-truncation used to compute `b`.
pub fn cup_diagram(
    b: &AnnotatedBarcode,
    c: &FilteredComplex,
    k: usize,
    opts: CupDiagramOptions,
) -> (CupDiagram, RunStats) {
    let rc = ReducedCoboundary::new(c);
    cup_diagram_with(b, c, &rc, k, opts)
}

/// Same as [`cup_diagram`], reusing a reduction of `c`.
pub fn cup_diagram_with(
    b: &AnnotatedBarcode,
    c: &FilteredComplex,
    rc: &ReducedCoboundary,
    k: usize,
    opts: CupDiagramOptions,
) -> (CupDiagram, RunStats) {
    let births = b.births();
    let search = SupportSearch { c, rc, births: &births };
    let mut diagram = CupDiagram::new();
    let mut stats = RunStats {
        m_k: c.count_positive_dim(),
        ..RunStats::default()
    };

    let first: Vec<Product> = b
        .bars()
        .iter()
        .filter(|bar| bar.length() >= opts.trim_eps)
        .map(|bar| Product {
            interval: bar.interval(),
            death: bar.death,
            cochain: bar.representative.clone(),
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    for p in &first {
        diagram.record(p.interval, 1);
    }
    stats.q_1 = first.len();
    stats.q_ell.push(first.len());

    let pool = if opts.parallel {
        opts.threads.and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok())
    } else {
        None
    };

    let mut current = first.clone();
    let mut ell = 1;
    while ell < k && !current.is_empty() {
        let pairs: Vec<(usize, usize)> = (0..first.len())
            .flat_map(|i| (0..current.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| first[i].cochain.dim() + current[j].cochain.dim() <= k)
            .collect();
        let evaluate = |&(i, j): &(usize, usize)| -> (Option<Product>, usize) {
            let (p1, p2) = (&first[i], &current[j]);
            let mut tests = 0;
            let lower = p1.interval.left().max(p2.interval.left());
            let death = p1.death.min(p2.death);
            let Some(d) = search.closed_right(death) else { return (None, 0) };
            if lower > d {
                return (None, 0);
            }
            let sigma = cup_product(&p1.cochain, &p2.cochain, c).restrict(c, d);
            let found = search.left_end(&sigma, lower, death, &mut tests).map(|left| Product {
                interval: Interval::closed_open(left, death.to_extended()),
                death,
                cochain: sigma,
            });
            (found, tests)
        };
        let results: Vec<(Option<Product>, usize)> = if opts.parallel {
            match &pool {
                Some(pool) => pool.install(|| pairs.par_iter().map(evaluate).collect()),
                None => pairs.par_iter().map(evaluate).collect(),
            }
        } else {
            pairs.iter().map(evaluate).collect()
        };
        stats.product_count += pairs.len();
        let mut next = BTreeSet::new();
        for (found, tests) in results {
            stats.coboundary_test_count += tests;
            if let Some(p) = found {
                next.insert(p);
            }
        }
        ell += 1;
        for p in &next {
            diagram.record(p.interval, ell as u32);
        }
        stats.q_ell.push(next.len());
        current = next.into_iter().collect();
    }
    (diagram, stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::compute_barcode;
    use crate::fixtures;

    fn cochain(dim: usize, lists: &[&[Vertex]]) -> Cochain {
        Cochain::from_vertex_lists(dim, lists)
    }

    fn complex_from(maximal: &[&[Vertex]]) -> FilteredComplex {
        fixtures::closure(maximal.iter().map(|s| (s.to_vec(), 0.0)))
    }

    #[test]
    fn cup_product_examples() {
        let c = complex_from(&[&[0, 1, 2], &[1, 2, 3]]);
        assert_eq!(
            cup_product(&cochain(1, &[&[0, 1]]), &cochain(1, &[&[1, 2]]), &c),
            cochain(2, &[&[0, 1, 2]])
        );
        assert!(cup_product(&cochain(1, &[&[0, 1]]), &cochain(1, &[&[0, 2]]), &c).is_zero());
        assert_eq!(
            cup_product(&cochain(1, &[&[0, 1], &[1, 2]]), &cochain(1, &[&[2, 3]]), &c),
            cochain(2, &[&[1, 2, 3]])
        );
        assert!(cup_product(&cochain(2, &[&[0, 1, 2]]), &cochain(1, &[&[2, 3]]), &c).is_zero());
    }

    #[test]
    fn cup_product_cancels_mod_two() {
        let c = complex_from(&[&[0, 1, 2]]);
        // [0,1]*[1,2] appears from both summands of the second factor's expansion.
        let s1 = cochain(1, &[&[0, 1]]);
        let s2 = cochain(1, &[&[1, 2]]);
        let p = cup_product(&s1.add(&cochain(1, &[&[0, 2]])), &s2, &c);
        assert_eq!(p, cochain(2, &[&[0, 1, 2]]));
    }

    #[test]
    fn cup_product_with_zero_degree() {
        let c = complex_from(&[&[0, 1]]);
        let unit = cochain(0, &[&[0], &[1]]);
        let e = cochain(1, &[&[0, 1]]);
        assert_eq!(cup_product(&unit, &e, &c), e);
        assert_eq!(cup_product(&e, &unit, &c), e);
    }

    #[test]
    fn torus_supports() {
        let c = fixtures::torus7();
        let b = compute_barcode(&c, 2);
        let rc = ReducedCoboundary::new(&c);
        let ones: Vec<_> = b.in_dim(1).collect();
        assert_eq!(ones.len(), 2);
        let births = b.births();
        let ab = cup_product(&ones[0].representative, &ones[1].representative, &c);
        let s = support(&ab, &[ones[0].interval(), ones[1].interval()], &rc, &c, &births);
        assert_eq!(s, Some(Interval::closed_open(0.0, f64::INFINITY)));
        for bar in &ones {
            let sq = cup_product(&bar.representative, &bar.representative, &c);
            assert_eq!(support(&sq, &[bar.interval(), bar.interval()], &rc, &c, &births), None);
        }
    }

    #[test]
    fn klein_mixed_product_support() {
        let c = fixtures::klein();
        let b = compute_barcode(&c, 2);
        let rc = ReducedCoboundary::new(&c);
        let short = b.in_dim(1).find(|x| x.death == Death::Finite(3.0)).unwrap();
        let long = b.in_dim(1).find(|x| x.death == Death::Infinite).unwrap();
        let prod = cup_product(&short.representative, &long.representative, &c);
        let s = support(&prod, &[short.interval(), long.interval()], &rc, &c, &b.births());
        assert_eq!(s, Some(Interval::closed_open(2.0, 3.0)));
        let rev = cup_product(&long.representative, &short.representative, &c);
        assert_eq!(s, support(&rev, &[long.interval(), short.interval()], &rc, &c, &b.births()));
    }

    #[test]
    fn diagrams_of_fixtures() {
        let c = fixtures::hollow_triangle().truncate(3);
        let b = compute_barcode(&c, 2);
        let (d, _) = cup_diagram(&b, &c, 2, CupDiagramOptions::serial());
        assert_eq!(d, CupDiagram::from_points([(Interval::closed_open(0.0, f64::INFINITY), 1)]));

        let c = fixtures::torus7();
        let b = compute_barcode(&c, 2);
        let (d, stats) = cup_diagram(&b, &c, 2, CupDiagramOptions::serial());
        assert_eq!(d, CupDiagram::from_points([(Interval::closed_open(0.0, f64::INFINITY), 2)]));
        assert_eq!(stats.q_1, 3);
        assert_eq!(stats.q_ell.len(), 2);

        let c = fixtures::klein();
        let b = compute_barcode(&c, 2);
        let (d, _) = cup_diagram(&b, &c, 2, CupDiagramOptions::default());
        let expected = CupDiagram::from_points([
            (Interval::closed_open(1.0, 3.0), 1),
            (Interval::closed_open(2.0, 3.0), 2),
            (Interval::closed_open(2.0, f64::INFINITY), 2),
        ]);
        assert_eq!(d, expected);
    }

    #[test]
    fn trimming_drops_short_bars() {
        let c = fixtures::two_disks();
        let b = compute_barcode(&c, 1);
        let (d, stats) = cup_diagram(&b, &c, 1, CupDiagramOptions::serial().with_trim(2.5));
        assert!(d.is_empty());
        assert_eq!(stats.q_1, 0);
    }

    #[test]
    fn record_keeps_maximum() {
        let mut d = CupDiagram::new();
        let i = Interval::closed_open(0.0, 1.0);
        d.record(i, 2);
        d.record(i, 1);
        d.record(i, 0);
        assert_eq!(d.get(&i), Some(2));
        assert_eq!(d.len(), 1);
    }
}
