//! Filtered simplicial complexes.
//!
//! A [`FilteredComplex`] stores its simplices in filtration order: grade
//! ascending, then dimension ascending, then lexicographically by vertex
//! list. Grades are kept exactly as given; the critical values are the
//! sorted distinct grades.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use smallvec::SmallVec;
use thiserror::Error;

pub type Vertex = u32;

/// Distances closer than this are treated as equal when checking symmetry.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComplexError {
    #[error("the simplex list is empty")]
    Empty,
    #[error("simplex has no vertices")]
    EmptySimplex,
    #[error("simplex {0:?} repeats a vertex")]
    RepeatedVertex(Vec<Vertex>),
    #[error("grade {grade} of simplex {simplex} is not finite")]
    NonFiniteGrade { simplex: Simplex, grade: f64 },
    #[error("simplex {0} appears more than once")]
    DuplicateSimplex(Simplex),
    #[error("face {face} of simplex {simplex} is missing")]
    MissingFace { simplex: Simplex, face: Simplex },
    #[error("face {face} has grade {face_grade} above the grade {grade} of {simplex}")]
    NonMonotoneGrades {
        simplex: Simplex,
        grade: f64,
        face: Simplex,
        face_grade: f64,
    },
    #[error("expected a simplex of dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: Simplex },
    #[error("simplex {0} is not in the complex")]
    UnknownSimplex(Simplex),
    #[error("distance matrix is not square (row {row} has {len} entries, expected {expected})")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("distance matrix is asymmetric at ({i}, {j})")]
    AsymmetricMatrix { i: usize, j: usize },
    #[error("distance ({i}, {j}) is negative")]
    NegativeDistance { i: usize, j: usize },
    #[error("distance ({i}, {j}) is not finite")]
    NonFiniteDistance { i: usize, j: usize },
    #[error("diagonal entry {i} is not zero")]
    NonZeroDiagonal { i: usize },
}

/// A simplex given by its strictly increasing vertex list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(SmallVec<[Vertex; 4]>);

impl Simplex {
    /// Builds a simplex from vertices in any order.
    pub fn new(vertices: impl IntoIterator<Item = Vertex>) -> Result<Self, ComplexError> {
        let mut v: SmallVec<[Vertex; 4]> = vertices.into_iter().collect();
        if v.is_empty() {
            return Err(ComplexError::EmptySimplex);
        }
        v.sort_unstable();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Err(ComplexError::RepeatedVertex(v.to_vec()));
        }
        Ok(Simplex(v))
    }

    /// Builds a simplex from a vertex list the caller knows is strictly increasing.
    pub(crate) fn from_sorted(vertices: &[Vertex]) -> Self {
        debug_assert!(!vertices.is_empty());
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Simplex(SmallVec::from_slice(vertices))
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn first(&self) -> Vertex {
        self.0[0]
    }

    pub fn last(&self) -> Vertex {
        self.0[self.0.len() - 1]
    }

    /// The codimension-one faces, obtained by dropping each vertex in turn.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |skip| {
            let v: SmallVec<[Vertex; 4]> = self
                .0
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &x)| x)
                .collect();
            Simplex(v)
        })
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A Z/2 cochain: a set of simplices of a common dimension, read as the
/// sum of their dual cosimplices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Cochain {
    dim: usize,
    summands: BTreeSet<Simplex>,
}

impl Cochain {
    pub fn zero(dim: usize) -> Self {
        Cochain {
            dim,
            summands: BTreeSet::new(),
        }
    }

    /// Sums the given simplices mod 2. Fails if their dimensions differ from `dim`.
    pub fn from_simplices(
        dim: usize,
        simplices: impl IntoIterator<Item = Simplex>,
    ) -> Result<Self, ComplexError> {
        let mut c = Cochain::zero(dim);
        for s in simplices {
            if s.dim() != dim {
                return Err(ComplexError::DimensionMismatch {
                    expected: dim,
                    found: s,
                });
            }
            c.toggle(s);
        }
        Ok(c)
    }

    /// Convenience constructor from raw vertex lists; panics on malformed input.
    pub fn from_vertex_lists(dim: usize, lists: &[&[Vertex]]) -> Self {
        let simplices = lists.iter().map(|v| Simplex::new(v.iter().copied()).expect("valid simplex"));
        Cochain::from_simplices(dim, simplices).expect("uniform dimension")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn summands(&self) -> &BTreeSet<Simplex> {
        &self.summands
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_zero(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.summands.contains(s)
    }

    /// Adds one cosimplex mod 2.
    pub fn toggle(&mut self, s: Simplex) {
        debug_assert_eq!(s.dim(), self.dim);
        if !self.summands.remove(&s) {
            self.summands.insert(s);
        }
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        debug_assert_eq!(self.dim, other.dim);
        Cochain {
            dim: self.dim,
            summands: self
                .summands
                .symmetric_difference(&other.summands)
                .cloned()
                .collect(),
        }
    }

    /// Restriction to the stage `X_t`: drops summands born after `t`.
    /// Summands missing from `c` are dropped as well.
    pub fn restrict(&self, c: &FilteredComplex, t: f64) -> Cochain {
        Cochain {
            dim: self.dim,
            summands: self
                .summands
                .iter()
                .filter(|s| c.grade_of(s).is_ok_and(|g| g <= t))
                .cloned()
                .collect(),
        }
    }

    /// The coboundary computed inside the stage `X_t`.
    pub fn coboundary(&self, c: &FilteredComplex, t: f64) -> Cochain {
        let mut out = Cochain::zero(self.dim + 1);
        for (s, &g) in c.simplices().iter().zip(c.grades()) {
            if g > t {
                break;
            }
            if s.dim() != self.dim + 1 {
                continue;
            }
            let hits = s.facets().filter(|f| self.summands.contains(f)).count();
            if hits % 2 == 1 {
                out.summands.insert(s.clone());
            }
        }
        out
    }
}

impl fmt::Display for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.summands.is_empty() {
            return write!(f, "0");
        }
        for (i, s) in self.summands.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{s}*")?;
        }
        Ok(())
    }
}

fn filtration_cmp(a: &(Simplex, f64), b: &(Simplex, f64)) -> Ordering {
    a.1.total_cmp(&b.1)
        .then_with(|| a.0.dim().cmp(&b.0.dim()))
        .then_with(|| a.0.cmp(&b.0))
}

#[derive(Clone, Debug)]
pub struct FilteredComplex {
    simplices: Vec<Simplex>,
    grades: Vec<f64>,
    index: HashMap<Simplex, usize>,
    critical_values: Vec<f64>,
    dim: usize,
}

impl PartialEq for FilteredComplex {
    fn eq(&self, other: &Self) -> bool {
        self.simplices == other.simplices && self.grades == other.grades
    }
}

impl FilteredComplex {
    /// Validates a list of `(vertices, grade)` pairs and sorts it into
    /// filtration order. Vertex lists may be given in any order.
    pub fn from_simplex_list<I, V>(entries: I) -> Result<Self, ComplexError>
    where
        I: IntoIterator<Item = (V, f64)>,
        V: IntoIterator<Item = Vertex>,
    {
        let mut list = Vec::new();
        for (vs, grade) in entries {
            let s = Simplex::new(vs)?;
            if !grade.is_finite() {
                return Err(ComplexError::NonFiniteGrade { simplex: s, grade });
            }
            list.push((s, grade));
        }
        if list.is_empty() {
            return Err(ComplexError::Empty);
        }
        let mut grade_of: HashMap<Simplex, f64> = HashMap::with_capacity(list.len());
        for (s, g) in &list {
            if grade_of.insert(s.clone(), *g).is_some() {
                return Err(ComplexError::DuplicateSimplex(s.clone()));
            }
        }
        for (s, g) in &list {
            for face in s.facets() {
                match grade_of.get(&face) {
                    None => {
                        return Err(ComplexError::MissingFace {
                            simplex: s.clone(),
                            face,
                        })
                    }
                    Some(&fg) if fg > *g => {
                        return Err(ComplexError::NonMonotoneGrades {
                            simplex: s.clone(),
                            grade: *g,
                            face,
                            face_grade: fg,
                        })
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(Self::from_valid(list))
    }

    fn from_valid(mut list: Vec<(Simplex, f64)>) -> Self {
        list.sort_by(filtration_cmp);
        let dim = list.iter().map(|(s, _)| s.dim()).max().unwrap_or(0);
        let mut critical_values: Vec<f64> = list.iter().map(|(_, g)| *g).collect();
        critical_values.dedup();
        let index = list
            .iter()
            .enumerate()
            .map(|(i, (s, _))| (s.clone(), i))
            .collect();
        let (simplices, grades) = list.into_iter().unzip();
        FilteredComplex {
            simplices,
            grades,
            index,
            critical_values,
            dim,
        }
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Largest simplex dimension present.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Simplices in filtration order.
    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    /// Grades aligned with [`simplices`](Self::simplices).
    pub fn grades(&self) -> &[f64] {
        &self.grades
    }

    pub fn simplex(&self, i: usize) -> &Simplex {
        &self.simplices[i]
    }

    pub fn grade(&self, i: usize) -> f64 {
        self.grades[i]
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn index_of_vertices(&self, vertices: &[Vertex]) -> Option<usize> {
        self.index.get(&Simplex::from_sorted(vertices)).copied()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.index.contains_key(s)
    }

    pub fn grade_of(&self, s: &Simplex) -> Result<f64, ComplexError> {
        self.index_of(s)
            .map(|i| self.grades[i])
            .ok_or_else(|| ComplexError::UnknownSimplex(s.clone()))
    }

    pub fn critical_values(&self) -> &[f64] {
        &self.critical_values
    }

    /// Whether `s` belongs to the stage `X_t`.
    pub fn alive_at(&self, s: &Simplex, t: f64) -> Result<bool, ComplexError> {
        Ok(self.grade_of(s)? <= t)
    }

    /// Number of simplices of `X_t`; they are exactly the first ones in order.
    pub fn count_alive(&self, t: f64) -> usize {
        self.grades.partition_point(|&g| g <= t)
    }

    /// Largest critical value strictly below `x`.
    pub fn critical_before(&self, x: f64) -> Option<f64> {
        let k = self.critical_values.partition_point(|&c| c < x);
        k.checked_sub(1).map(|i| self.critical_values[i])
    }

    /// Keeps only the simplices of dimension strictly below `dim_cap`.
    /// For a cohomological degree bound `k`, pass `k + 1`.
    pub fn truncate(&self, dim_cap: usize) -> FilteredComplex {
        let list = self
            .simplices
            .iter()
            .zip(&self.grades)
            .filter(|(s, _)| s.dim() <= dim_cap)
            .map(|(s, g)| (s.clone(), *g))
            .collect::<Vec<_>>();
        Self::from_valid(list)
    }

    pub fn count_positive_dim(&self) -> usize {
        self.simplices.iter().filter(|s| s.dim() > 0).count()
    }
}

/// Checks that `d` is a square, symmetric, non-negative matrix with zero
/// diagonal.
pub fn check_distance_matrix(d: &[Vec<f64>]) -> Result<(), ComplexError> {
    let n = d.len();
    for (i, row) in d.iter().enumerate() {
        if row.len() != n {
            return Err(ComplexError::NotSquare {
                row: i,
                len: row.len(),
                expected: n,
            });
        }
    }
    for i in 0..n {
        if d[i][i] != 0.0 {
            return Err(ComplexError::NonZeroDiagonal { i });
        }
        for j in 0..n {
            let x = d[i][j];
            if !x.is_finite() {
                return Err(ComplexError::NonFiniteDistance { i, j });
            }
            if x < 0.0 {
                return Err(ComplexError::NegativeDistance { i, j });
            }
            if (x - d[j][i]).abs() > SYMMETRY_TOLERANCE {
                return Err(ComplexError::AsymmetricMatrix { i, j });
            }
        }
    }
    Ok(())
}

/// Vietoris-Rips filtration: vertices at grade 0, every other simplex at its
/// diameter, up to dimension `max_dim` and scale `max_scale`.
pub fn build_vietoris_rips(
    d: &[Vec<f64>],
    max_dim: usize,
    max_scale: f64,
) -> Result<FilteredComplex, ComplexError> {
    check_distance_matrix(d)?;
    let n = d.len();
    if n == 0 {
        return Err(ComplexError::Empty);
    }
    let mut list: Vec<(Simplex, f64)> = Vec::new();
    let mut frontier: Vec<(Vec<Vertex>, f64)> = (0..n as Vertex).map(|v| (vec![v], 0.0)).collect();
    for _ in 0..=max_dim {
        let mut next = Vec::new();
        for (vs, diam) in &frontier {
            list.push((Simplex::from_sorted(vs), *diam));
            if vs.len() > max_dim {
                continue;
            }
            let last = *vs.last().unwrap() as usize;
            'extend: for w in last + 1..n {
                let mut dw = *diam;
                for &u in vs {
                    let x = d[u as usize][w];
                    if x > max_scale {
                        continue 'extend;
                    }
                    dw = dw.max(x);
                }
                let mut ext = vs.clone();
                ext.push(w as Vertex);
                next.push((ext, dw));
            }
        }
        frontier = next;
    }
    Ok(FilteredComplex::from_valid(list))
}
