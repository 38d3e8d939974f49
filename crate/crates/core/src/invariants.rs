//! Persistent cup-length functions and the erosion distance.
//!
//! A [`CupFunction`] is a finite set of generators `(interval, value)`; its
//! value on a query interval is the largest value of a generator containing
//! the query, or zero.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use crate::cupalg::CupDiagram;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntervalError {
    #[error("left endpoint {0} must be finite")]
    NonFiniteLeft(f64),
    #[error("right endpoint is NaN")]
    NanRight,
    #[error("interval with ends {left} and {right} is empty")]
    Empty { left: f64, right: f64 },
}

/// An interval of the real line with a finite left end and a right end that
/// may be `+∞`. An infinite right end is always open.
#[derive(Clone, Copy, Debug)]
pub struct Interval {
    left: f64,
    right: f64,
    left_closed: bool,
    right_closed: bool,
}

impl Interval {
    pub fn new(left: f64, right: f64, left_closed: bool, right_closed: bool) -> Result<Self, IntervalError> {
        if !left.is_finite() {
            return Err(IntervalError::NonFiniteLeft(left));
        }
        if right.is_nan() {
            return Err(IntervalError::NanRight);
        }
        let right_closed = right_closed && right.is_finite();
        let ok = left < right || (left == right && left_closed && right_closed);
        if !ok {
            return Err(IntervalError::Empty { left, right });
        }
        Ok(Interval {
            left,
            right,
            left_closed,
            right_closed,
        })
    }

    /// `[a, b]`.
    ///
    /// # Panics
    /// If the interval would be empty.
    pub fn closed(a: f64, b: f64) -> Self {
        Self::new(a, b, true, true).expect("valid closed interval")
    }

    /// `(a, b)`.
    pub fn open(a: f64, b: f64) -> Self {
        Self::new(a, b, false, false).expect("valid open interval")
    }

    /// `[a, b)`, with `b` possibly `+∞`.
    pub fn closed_open(a: f64, b: f64) -> Self {
        Self::new(a, b, true, false).expect("valid closed-open interval")
    }

    pub fn left(&self) -> f64 {
        self.left
    }

    pub fn right(&self) -> f64 {
        self.right
    }

    pub fn left_closed(&self) -> bool {
        self.left_closed
    }

    pub fn right_closed(&self) -> bool {
        self.right_closed
    }

    pub fn is_right_infinite(&self) -> bool {
        self.right == f64::INFINITY
    }

    /// Whether `other ⊆ self`.
    pub fn contains(&self, other: &Interval) -> bool {
        let left_ok = self.left < other.left || (self.left == other.left && (self.left_closed || !other.left_closed));
        let right_ok =
            other.right < self.right || (other.right == self.right && (self.right_closed || !other.right_closed));
        left_ok && right_ok
    }

    pub fn contains_point(&self, x: f64) -> bool {
        self.contains(&Interval::closed(x, x))
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (left, left_closed) = match self.left.total_cmp(&other.left) {
            Ordering::Less => (other.left, other.left_closed),
            Ordering::Greater => (self.left, self.left_closed),
            Ordering::Equal => (self.left, self.left_closed && other.left_closed),
        };
        let (right, right_closed) = match self.right.total_cmp(&other.right) {
            Ordering::Less => (self.right, self.right_closed),
            Ordering::Greater => (other.right, other.right_closed),
            Ordering::Equal => (self.right, self.right_closed && other.right_closed),
        };
        Interval::new(left, right, left_closed, right_closed).ok()
    }
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Interval {}

impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.left
            .total_cmp(&other.left)
            .then_with(|| other.left_closed.cmp(&self.left_closed))
            .then_with(|| self.right.total_cmp(&other.right))
            .then_with(|| self.right_closed.cmp(&other.right_closed))
    }
}

impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.left_closed { '[' } else { '(' };
        let r = if self.right_closed { ']' } else { ')' };
        if self.is_right_infinite() {
            write!(f, "{l}{}, ∞{r}", self.left)
        } else {
            write!(f, "{l}{}, {}{r}", self.left, self.right)
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CupFunction {
    generators: Vec<(Interval, u32)>,
}

impl CupFunction {
    /// Builds a function from generators; zero-valued generators are dropped.
    pub fn new(generators: impl IntoIterator<Item = (Interval, u32)>) -> Self {
        let mut generators: Vec<_> = generators.into_iter().filter(|&(_, v)| v > 0).collect();
        generators.sort();
        generators.dedup();
        CupFunction { generators }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn generators(&self) -> &[(Interval, u32)] {
        &self.generators
    }

    pub fn evaluate(&self, query: &Interval) -> u32 {
        self.generators
            .iter()
            .filter(|(g, _)| g.contains(query))
            .map(|&(_, v)| v)
            .max()
            .unwrap_or(0)
    }

    /// Value on the closed interval `[a, b]`.
    pub fn at(&self, a: f64, b: f64) -> u32 {
        self.evaluate(&Interval::closed(a, b))
    }

    /// Finite endpoints of all generators, sorted and deduplicated.
    pub fn endpoints(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self
            .generators
            .iter()
            .flat_map(|(g, _)| [g.left, g.right])
            .filter(|x| x.is_finite())
            .collect();
        e.sort_by(f64::total_cmp);
        e.dedup();
        e
    }
}

/// The function whose generators are the diagram's points.
pub fn reconstruct(d: &CupDiagram) -> CupFunction {
    CupFunction::new(d.iter().map(|(i, v)| (*i, *v)))
}

pub fn evaluate(f: &CupFunction, query: &Interval) -> u32 {
    f.evaluate(query)
}

/// Generators of `f`, of `g`, and of every non-empty pairwise intersection
/// carrying the summed value.
pub fn pointwise_sum(f: &CupFunction, g: &CupFunction) -> CupFunction {
    let mut gens: Vec<(Interval, u32)> = f.generators.iter().chain(&g.generators).copied().collect();
    for (i, v) in &f.generators {
        for (j, w) in &g.generators {
            if let Some(k) = i.intersect(j) {
                gens.push((k, v + w));
            }
        }
    }
    CupFunction::new(gens)
}

pub fn pointwise_max(f: &CupFunction, g: &CupFunction) -> CupFunction {
    CupFunction::new(f.generators.iter().chain(&g.generators).copied())
}

/// Whether every closed `[a, b]` satisfies `f([a, b]) ≥ g([a − ε, b + ε])`.
///
/// For a generator `(J, v)` of `g`, the queries it dominates after expansion
/// form a region whose extreme point is `(left(J) + ε, right(J) − ε)`; the
/// region is covered by `f` exactly when one generator of `f` with value at
/// least `v` contains every query of the region.
fn dominates_after_expansion(f: &CupFunction, g: &CupFunction, eps: f64) -> bool {
    g.generators.iter().all(|(j, v)| {
        let a = j.left + eps;
        let b = j.right - eps;
        let nonempty = a < b || (a == b && j.left_closed && j.right_closed);
        if !nonempty {
            return true;
        }
        f.generators.iter().any(|(k, w)| {
            if w < v {
                return false;
            }
            let left_ok = if j.left_closed {
                k.left < a || (k.left == a && k.left_closed)
            } else {
                k.left <= a
            };
            let right_ok = if j.is_right_infinite() {
                k.is_right_infinite()
            } else if j.right_closed {
                k.right > b || (k.right == b && k.right_closed)
            } else {
                k.right >= b
            };
            left_ok && right_ok
        })
    })
}

/// Whether `f` and `g` are `ε`-eroded into each other.
pub fn is_eroded(f: &CupFunction, g: &CupFunction, eps: f64) -> bool {
    dominates_after_expansion(f, g, eps) && dominates_after_expansion(g, f, eps)
}

/// Values of `ε` at which [`is_eroded`] can change: differences of matching
/// endpoints across the two functions and half-lengths of generators.
fn erosion_candidates(f: &CupFunction, g: &CupFunction) -> Vec<f64> {
    let mut cands = vec![0.0];
    for (x, y) in [(f, g), (g, f)] {
        for (j, _) in &y.generators {
            if j.right.is_finite() {
                cands.push((j.right - j.left) / 2.0);
            }
            for (k, _) in &x.generators {
                cands.push(k.left - j.left);
                if j.right.is_finite() && k.right.is_finite() {
                    cands.push(j.right - k.right);
                }
            }
        }
    }
    cands.retain(|&e| e >= 0.0);
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    cands
}

/// Erosion distance: the infimum of `ε ≥ 0` for which the functions are
/// `ε`-eroded, or `f64::INFINITY` if there is none.
pub fn erosion_distance(f: &CupFunction, g: &CupFunction) -> f64 {
    let cands = erosion_candidates(f, g);
    // The predicate is constant strictly between consecutive candidates.
    let passes_above = |i: usize| {
        let probe = match cands.get(i + 1) {
            Some(&next) => cands[i] + (next - cands[i]) / 2.0,
            None => cands[i] + 1.0,
        };
        is_eroded(f, g, probe)
    };
    let first = (0..cands.len()).collect::<Vec<_>>().partition_point(|&i| !passes_above(i));
    cands.get(first).copied().unwrap_or(f64::INFINITY)
}

fn analytic_intervals(count: usize) -> impl Iterator<Item = Interval> {
    (0..count).map(|l| {
        let l = l as f64;
        Interval::open(2.0 * PI * l / (2.0 * l + 1.0), 2.0 * PI * (l + 1.0) / (2.0 * l + 3.0))
    })
}

/// Cup-length function of the Vietoris-Rips filtration of the geodesic
/// circle of length `2π`, materialized on its first `count` intervals.
pub fn analytic_vr_circle(count: usize) -> CupFunction {
    CupFunction::new(analytic_intervals(count).map(|i| (i, 1)))
}

/// Cup-length function of the Vietoris-Rips filtration of the torus
/// `S¹ × S¹`, on the same intervals as [`analytic_vr_circle`].
pub fn analytic_vr_torus(count: usize) -> CupFunction {
    CupFunction::new(analytic_intervals(count).map(|i| (i, 2)))
}

/// Lower model of the cup-length function of the wedge `S¹ ∨ S² ∨ S¹`:
/// value one on `(0, arccos(−1/3))`.
pub fn analytic_vr_wedge_lower() -> CupFunction {
    CupFunction::new([(Interval::open(0.0, (-1.0f64 / 3.0).acos()), 1)])
}
