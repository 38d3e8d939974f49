//! Persistent cohomology barcodes with representative cocycles.
//!
//! Bars come from the reduced coboundary matrix: a column with pivot pairs
//! its cosimplex (birth) with the pivot cosimplex (death), and the matching
//! column of `V` is a cochain whose coboundary starts at the death simplex,
//! so it is a cocycle on every stage before the death.

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use crate::complex::Cochain;
use crate::complex::FilteredComplex;
use crate::invariants::Interval;
use crate::oracle;
use crate::z2linalg::{symmetric_difference, ReducedCoboundary};

/// Right end of a bar.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Death {
    Finite(f64),
    Infinite,
}

impl Death {
    pub fn is_finite(&self) -> bool {
        matches!(self, Death::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            Death::Finite(x) => Some(x),
            Death::Infinite => None,
        }
    }

    /// Whether `t` lies strictly before this death.
    pub fn after(&self, t: f64) -> bool {
        match *self {
            Death::Finite(x) => t < x,
            Death::Infinite => true,
        }
    }

    /// The death on the extended real line, for interval arithmetic.
    pub fn to_extended(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl Eq for Death {}

impl Ord for Death {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Death::Finite(a), Death::Finite(b)) => a.total_cmp(b),
            (Death::Finite(_), Death::Infinite) => Ordering::Less,
            (Death::Infinite, Death::Finite(_)) => Ordering::Greater,
            (Death::Infinite, Death::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Death {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Death {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Death::Finite(x) => write!(f, "{x}"),
            Death::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bar {
    pub dim: usize,
    pub birth: f64,
    pub death: Death,
    pub representative: Cochain,
}

impl Bar {
    /// The closed-open interval `[birth, death)`.
    pub fn interval(&self) -> Interval {
        Interval::closed_open(self.birth, self.death.to_extended())
    }

    pub fn contains(&self, t: f64) -> bool {
        self.birth <= t && self.death.after(t)
    }

    pub fn length(&self) -> f64 {
        self.death.to_extended() - self.birth
    }
}

fn bar_order(a: &Bar, b: &Bar) -> Ordering {
    a.death
        .cmp(&b.death)
        .then_with(|| a.birth.total_cmp(&b.birth))
        .then_with(|| a.dim.cmp(&b.dim))
        .then_with(|| a.representative.cmp(&b.representative))
}

/// Bars in degrees `1..=max_dim`, ordered by death and then by birth.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnotatedBarcode {
    bars: Vec<Bar>,
    max_dim: usize,
}

impl AnnotatedBarcode {
    /// Wraps arbitrary bars, sorting them into the canonical order.
    pub fn from_bars(mut bars: Vec<Bar>, max_dim: usize) -> Self {
        bars.sort_by(bar_order);
        AnnotatedBarcode { bars, max_dim }
    }

    pub fn bars(&self) -> &[Bar] {
        &self.bars
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn in_dim(&self, p: usize) -> impl Iterator<Item = &Bar> {
        self.bars.iter().filter(move |b| b.dim == p)
    }

    /// Sorted distinct birth values.
    pub fn births(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.bars.iter().map(|b| b.birth).collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// Replaces the representative of bar `i`, keeping the order.
    pub fn with_representative(&self, i: usize, rep: Cochain) -> Self {
        let mut bars = self.bars.clone();
        bars[i].representative = rep;
        AnnotatedBarcode {
            bars,
            max_dim: self.max_dim,
        }
    }
}

/// Barcode in degrees `1..=k` of a complex already truncated to dimension
/// `k + 1`.
pub fn compute_barcode(c: &FilteredComplex, k: usize) -> AnnotatedBarcode {
    compute_barcode_with(c, k, &ReducedCoboundary::new(c))
}

/// Same as [`compute_barcode`], reusing a reduction built with
/// [`ReducedCoboundary::new`].
pub fn compute_barcode_with(c: &FilteredComplex, k: usize, rc: &ReducedCoboundary) -> AnnotatedBarcode {
    assert_eq!(rc.basis().min_dim(), 0, "barcode needs the vertex block");
    let basis = rc.basis();
    let red = rc.reduction();
    let mut bars = Vec::new();
    for j in 0..basis.len() {
        let i = basis.simplex_at(j);
        let dim = c.simplex(i).dim();
        if dim == 0 || dim > k {
            continue;
        }
        let birth = c.grade(i);
        let death = match red.r.pivot(j) {
            Some(q) => Death::Finite(c.grade(basis.simplex_at(q as usize))),
            None if red.is_pivot(j as u32) => continue,
            None => Death::Infinite,
        };
        if let Death::Finite(d) = death {
            if d <= birth {
                continue;
            }
        }
        let summands = red
            .v
            .column(j)
            .iter()
            .map(|&pos| basis.simplex_at(pos as usize))
            .filter(|&s| death.after(c.grade(s)))
            .map(|s| c.simplex(s).clone());
        let representative = Cochain::from_simplices(dim, summands).expect("V columns are homogeneous");
        bars.push(Bar {
            dim,
            birth,
            death,
            representative,
        });
    }
    AnnotatedBarcode::from_bars(bars, k)
}

/// Degree-zero bars by union-find with the elder rule, ordered like
/// [`AnnotatedBarcode`].
pub fn zero_dim_bars(c: &FilteredComplex) -> Vec<(f64, Death)> {
    let n = c.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut bars = Vec::new();
    let mut roots = Vec::new();
    for (i, s) in c.simplices().iter().enumerate() {
        match s.dim() {
            0 => roots.push(i),
            1 => {
                let u = c.index_of_vertices(&s.vertices()[..1]).unwrap();
                let v = c.index_of_vertices(&s.vertices()[1..]).unwrap();
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                if ru == rv {
                    continue;
                }
                // Roots are vertex indices, so the larger index is the younger component.
                let (old, young) = if ru < rv { (ru, rv) } else { (rv, ru) };
                parent[young] = old;
                if c.grade(young) < c.grade(i) {
                    bars.push((c.grade(young), Death::Finite(c.grade(i))));
                }
            }
            _ => {}
        }
    }
    for r in roots {
        if find(&mut parent, r) == r {
            bars.push((c.grade(r), Death::Infinite));
        }
    }
    bars.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.total_cmp(&b.0)));
    bars
}

#[derive(Clone, Debug, PartialEq)]
pub enum FamilyFailureKind {
    /// The representative of this bar (index into the barcode) mentions a
    /// simplex outside the complex.
    UnknownSimplex { bar: usize },
    /// The restricted representative of this bar is not a cocycle.
    NotCocycle { bar: usize },
    /// Some non-trivial combination of restricted representatives is a coboundary.
    Dependent { bars: Vec<usize> },
    /// The number of alive bars differs from the Betti number.
    WrongCount { alive: usize, betti: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyFailure {
    pub t: f64,
    pub p: usize,
    pub kind: FamilyFailureKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyReport {
    pub failure: Option<FamilyFailure>,
}

impl FamilyReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Exhaustive independence checks are used up to this many alive bars.
const EXHAUSTIVE_LIMIT: usize = 12;
const RANDOM_COMBINATIONS: usize = 4096;

/// Checks that at every critical value `t` and degree `p` the restricted
/// representatives of the bars alive at `t` form a basis of `H^p(X_t)`.
pub fn validate_family(b: &AnnotatedBarcode, c: &FilteredComplex) -> FamilyReport {
    let rc = ReducedCoboundary::new(c);
    for &t in c.critical_values() {
        let betti = oracle::cohomology_basis(c, t, b.max_dim()).dims();
        for p in 1..=b.max_dim() {
            let fail = |kind| FamilyReport {
                failure: Some(FamilyFailure { t, p, kind }),
            };
            let alive: Vec<usize> = (0..b.len())
                .filter(|&i| b.bars()[i].dim == p && b.bars()[i].contains(t))
                .collect();
            let mut vectors = Vec::with_capacity(alive.len());
            for &i in &alive {
                let rep = &b.bars()[i].representative;
                if rep.summands().iter().any(|s| !c.contains(s)) || rep.dim() != p {
                    return fail(FamilyFailureKind::UnknownSimplex { bar: i });
                }
                let restricted = rep.restrict(c, t);
                if !restricted.coboundary(c, t).is_zero() {
                    return fail(FamilyFailureKind::NotCocycle { bar: i });
                }
                vectors.push(rc.positions(&restricted, t, c).expect("restricted summands are alive"));
            }
            let block = rc.basis().block_start(t);
            let dependent = |mask: u64| {
                let mut acc: Vec<u32> = Vec::new();
                for (bit, v) in vectors.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        acc = symmetric_difference(&acc, v);
                    }
                }
                rc.is_coboundary_at_block(&acc, block)
            };
            let members = |mask: u64| -> Vec<usize> {
                (0..alive.len()).filter(|&bit| mask >> bit & 1 == 1).map(|bit| alive[bit]).collect()
            };
            if alive.len() <= EXHAUSTIVE_LIMIT {
                for mask in 1..(1u64 << alive.len()) {
                    if dependent(mask) {
                        return fail(FamilyFailureKind::Dependent { bars: members(mask) });
                    }
                }
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
                let width = alive.len().min(64);
                for _ in 0..RANDOM_COMBINATIONS {
                    let mut mask: u64 = rng.gen();
                    if width < 64 {
                        mask &= (1u64 << width) - 1;
                    }
                    if mask != 0 && dependent(mask) {
                        return fail(FamilyFailureKind::Dependent { bars: members(mask) });
                    }
                }
            }
            if alive.len() != betti[p] {
                return fail(FamilyFailureKind::WrongCount {
                    alive: alive.len(),
                    betti: betti[p],
                });
            }
        }
    }
    FamilyReport { failure: None }
}
