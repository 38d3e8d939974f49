//! Sparse linear algebra over Z/2.
//!
//! Matrices are stored by columns, each column a strictly increasing list of
//! row indices. The pivot of a column is its largest row index.
//!
//! Coboundary matrices are indexed by cosimplices in reverse filtration
//! order, so position `0` is the last simplex of the filtration. In that
//! order the coboundary matrix, the reduction matrices `V` and `U`, and
//! every principal trailing block belonging to an earlier stage are upper
//! triangular.

use thiserror::Error;

use crate::complex::{Cochain, FilteredComplex, Simplex};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoboundaryError {
    #[error("simplex {simplex} is not alive at {t}")]
    SimplexNotAlive { simplex: Simplex, t: f64 },
    #[error("simplex {0} is not in the complex")]
    UnknownSimplex(Simplex),
    #[error("simplex {0} has a dimension outside the reduced coboundary matrix")]
    DimensionNotIndexed(Simplex),
}

/// Symmetric difference of two strictly increasing lists.
pub fn symmetric_difference(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Keeps the entries that occur an odd number of times, sorted.
fn odd_entries(mut entries: Vec<u32>) -> Vec<u32> {
    entries.sort_unstable();
    let mut out = Vec::with_capacity(entries.len());
    let mut i = 0;
    while i < entries.len() {
        let mut j = i;
        while j < entries.len() && entries[j] == entries[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(entries[i]);
        }
        i = j;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseZ2Matrix {
    n_rows: usize,
    cols: Vec<Vec<u32>>,
}

impl SparseZ2Matrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        SparseZ2Matrix {
            n_rows,
            cols: vec![Vec::new(); n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseZ2Matrix {
            n_rows: n,
            cols: (0..n as u32).map(|i| vec![i]).collect(),
        }
    }

    /// Builds a matrix from column entry lists. Repeated entries cancel.
    ///
    /// # Panics
    /// If an entry is out of bounds.
    pub fn from_columns(n_rows: usize, cols: Vec<Vec<u32>>) -> Self {
        let cols = cols
            .into_iter()
            .map(|c| {
                assert!(c.iter().all(|&r| (r as usize) < n_rows), "row index out of bounds");
                odd_entries(c)
            })
            .collect();
        SparseZ2Matrix { n_rows, cols }
    }

    /// Builds a matrix from a dense row-major 0/1 array.
    pub fn from_dense(rows: &[Vec<u8>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        let mut cols = vec![Vec::new(); n_cols];
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n_cols, "ragged dense matrix");
            for (j, &x) in row.iter().enumerate() {
                if x % 2 == 1 {
                    cols[j].push(i as u32);
                }
            }
        }
        SparseZ2Matrix { n_rows, cols }
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut d = vec![vec![0u8; self.n_cols()]; self.n_rows];
        for (j, c) in self.cols.iter().enumerate() {
            for &i in c {
                d[i as usize][j] = 1;
            }
        }
        d
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &[u32] {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[Vec<u32>] {
        &self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cols[j].binary_search(&(i as u32)).is_ok()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn pivot(&self, j: usize) -> Option<u32> {
        self.cols[j].last().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn transpose(&self) -> SparseZ2Matrix {
        let mut cols = vec![Vec::new(); self.n_rows];
        for (j, c) in self.cols.iter().enumerate() {
            for &i in c {
                cols[i as usize].push(j as u32);
            }
        }
        SparseZ2Matrix {
            n_rows: self.n_cols(),
            cols,
        }
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &SparseZ2Matrix) -> SparseZ2Matrix {
        assert_eq!(self.n_cols(), rhs.n_rows, "dimension mismatch");
        let cols = rhs.cols.iter().map(|c| self.mul_entries(c)).collect();
        SparseZ2Matrix {
            n_rows: self.n_rows,
            cols,
        }
    }

    /// Product with the vector whose support is `entries`.
    pub fn mul_entries(&self, entries: &[u32]) -> Vec<u32> {
        let mut acc = Vec::new();
        for &k in entries {
            acc.extend_from_slice(&self.cols[k as usize]);
        }
        odd_entries(acc)
    }

    /// Whether every entry lies on or above the diagonal.
    pub fn is_upper_triangular(&self) -> bool {
        self.cols
            .iter()
            .enumerate()
            .all(|(j, c)| c.last().is_none_or(|&p| p as usize <= j))
    }

    pub fn has_unit_diagonal(&self) -> bool {
        (0..self.n_cols().min(self.n_rows)).all(|j| self.get(j, j))
    }
}

/// Which simplices index a coboundary matrix, and where.
///
/// Position `n - 1 - q` holds the `q`-th selected simplex in filtration
/// order, so the simplices alive at any parameter occupy a trailing block.
#[derive(Clone, Debug)]
pub struct CoboundaryBasis {
    min_dim: usize,
    simplex_at: Vec<usize>,
    position_of: Vec<Option<u32>>,
    grades: Vec<f64>,
    dims: Vec<usize>,
}

impl CoboundaryBasis {
    pub fn new(c: &FilteredComplex, min_dim: usize) -> Self {
        let selected: Vec<usize> = (0..c.len()).filter(|&i| c.simplex(i).dim() >= min_dim).collect();
        let n = selected.len();
        let mut position_of = vec![None; c.len()];
        let mut simplex_at = vec![0; n];
        for (q, &i) in selected.iter().enumerate() {
            let pos = n - 1 - q;
            position_of[i] = Some(pos as u32);
            simplex_at[pos] = i;
        }
        let grades = selected.iter().map(|&i| c.grade(i)).collect();
        let dims = simplex_at.iter().map(|&i| c.simplex(i).dim()).collect();
        CoboundaryBasis {
            min_dim,
            simplex_at,
            position_of,
            grades,
            dims,
        }
    }

    pub fn len(&self) -> usize {
        self.simplex_at.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplex_at.is_empty()
    }

    pub fn min_dim(&self) -> usize {
        self.min_dim
    }

    /// Index in the complex of the simplex at matrix position `pos`.
    pub fn simplex_at(&self, pos: usize) -> usize {
        self.simplex_at[pos]
    }

    pub fn position_of(&self, simplex_index: usize) -> Option<u32> {
        self.position_of[simplex_index]
    }

    /// Dimension of the cosimplex at each position.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of indexed simplices alive at `t`.
    pub fn stage_size(&self, t: f64) -> usize {
        self.grades.partition_point(|&g| g <= t)
    }

    /// First position of the trailing block alive at `t`.
    pub fn block_start(&self, t: f64) -> usize {
        self.len() - self.stage_size(t)
    }
}

fn build_coboundary(c: &FilteredComplex, basis: &CoboundaryBasis) -> SparseZ2Matrix {
    let n = basis.len();
    let mut cols: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (i, s) in c.simplices().iter().enumerate() {
        let Some(row) = basis.position_of(i) else { continue };
        for face in s.facets() {
            let fi = c.index_of(&face).expect("complex is closed under faces");
            if let Some(col) = basis.position_of(fi) {
                cols[col as usize].push(row);
            }
        }
    }
    for col in &mut cols {
        col.sort_unstable();
    }
    SparseZ2Matrix { n_rows: n, cols }
}

/// Coboundary matrix on the positive-dimensional cosimplices, in reverse
/// filtration order.
pub fn coboundary_matrix(c: &FilteredComplex) -> SparseZ2Matrix {
    build_coboundary(c, &CoboundaryBasis::new(c, 1))
}

/// Coboundary matrix on all cosimplices, vertices included.
pub fn full_coboundary_matrix(c: &FilteredComplex) -> SparseZ2Matrix {
    build_coboundary(c, &CoboundaryBasis::new(c, 0))
}

/// Result of a left-to-right column reduction `R = A·V`.
#[derive(Clone, Debug)]
pub struct ColumnReduction {
    pub a: SparseZ2Matrix,
    pub r: SparseZ2Matrix,
    pub v: SparseZ2Matrix,
    col_of_pivot: Vec<Option<u32>>,
}

impl ColumnReduction {
    /// Pivot rows in increasing order.
    pub fn pivots(&self) -> Vec<u32> {
        (0..self.col_of_pivot.len() as u32)
            .filter(|&i| self.col_of_pivot[i as usize].is_some())
            .collect()
    }

    pub fn is_pivot(&self, row: u32) -> bool {
        self.col_of_pivot[row as usize].is_some()
    }

    /// The column whose pivot is `row`, if any.
    pub fn column_with_pivot(&self, row: u32) -> Option<u32> {
        self.col_of_pivot[row as usize]
    }
}

/// Standard left-to-right column reduction.
pub fn column_reduce(a: &SparseZ2Matrix) -> ColumnReduction {
    let order: Vec<usize> = (0..a.n_cols()).collect();
    reduce_in_order(a, &order, None)
}

/// Column reduction of a coboundary matrix processed one dimension at a
/// time, skipping columns whose index is already known to be a pivot row
/// (they reduce to zero; `V` then takes the reduced coboundary that has the
/// column's index as pivot).
pub fn column_reduce_by_dimension(a: &SparseZ2Matrix, dims: &[usize]) -> ColumnReduction {
    assert_eq!(a.n_cols(), dims.len());
    assert_eq!(a.n_rows(), a.n_cols(), "clearing needs a square matrix");
    let mut order: Vec<usize> = (0..a.n_cols()).collect();
    order.sort_by_key(|&j| (dims[j], j));
    reduce_in_order(a, &order, Some(dims))
}

fn reduce_in_order(a: &SparseZ2Matrix, order: &[usize], dims: Option<&[usize]>) -> ColumnReduction {
    let n = a.n_cols();
    let mut r_cols: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut v_cols: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut col_of_pivot: Vec<Option<u32>> = vec![None; a.n_rows()];
    for &j in order {
        if dims.is_some() {
            if let Some(src) = col_of_pivot[j] {
                v_cols[j] = r_cols[src as usize].clone();
                continue;
            }
        }
        let mut r = a.cols[j].clone();
        let mut v = vec![j as u32];
        while let Some(&p) = r.last() {
            match col_of_pivot[p as usize] {
                Some(k) => {
                    let k = k as usize;
                    r = symmetric_difference(&r, &r_cols[k]);
                    v = symmetric_difference(&v, &v_cols[k]);
                }
                None => break,
            }
        }
        if let Some(&p) = r.last() {
            col_of_pivot[p as usize] = Some(j as u32);
        }
        r_cols[j] = r;
        v_cols[j] = v;
    }
    ColumnReduction {
        a: a.clone(),
        r: SparseZ2Matrix {
            n_rows: a.n_rows(),
            cols: r_cols,
        },
        v: SparseZ2Matrix {
            n_rows: n,
            cols: v_cols,
        },
        col_of_pivot,
    }
}

/// Row reduction of a column-reduced square matrix: returns the upper
/// unitriangular `U` for which `U·R` keeps only the pivot entry of each
/// non-zero column.
///
/// `U` is the inverse of the matrix obtained from the identity by replacing
/// column `p` with the column of `R` pivoted at `p`. Its columns are filled
/// in increasing order, since column `p` of `U` is `e_p` plus the columns of
/// `U` indexed by the non-pivot entries of that column of `R`.
///
/// # Panics
/// If `R` is not square or two non-zero columns share a pivot.
pub fn row_reduce(r: &SparseZ2Matrix) -> SparseZ2Matrix {
    let n = r.n_rows();
    assert_eq!(n, r.n_cols(), "row reduction needs a square matrix");
    let mut col_with_pivot: Vec<Option<usize>> = vec![None; n];
    for j in 0..n {
        if let Some(p) = r.pivot(j) {
            assert!(col_with_pivot[p as usize].is_none(), "pivots are not unique");
            col_with_pivot[p as usize] = Some(j);
        }
    }
    let mut u_cols: Vec<Vec<u32>> = Vec::with_capacity(n);
    for p in 0..n {
        let col = match col_with_pivot[p] {
            None => vec![p as u32],
            Some(j) => {
                let rc = r.column(j);
                let mut acc = vec![p as u32];
                for &i in &rc[..rc.len() - 1] {
                    acc.extend_from_slice(&u_cols[i as usize]);
                }
                odd_entries(acc)
            }
        };
        u_cols.push(col);
    }
    SparseZ2Matrix { n_rows: n, cols: u_cols }
}

/// A reduced coboundary matrix with everything needed to test whether a
/// cochain is a coboundary at any stage of the filtration.
#[derive(Clone, Debug)]
pub struct ReducedCoboundary {
    basis: CoboundaryBasis,
    reduction: ColumnReduction,
    u: SparseZ2Matrix,
    stage_sizes: Vec<(f64, usize)>,
}

impl ReducedCoboundary {
    /// Reduces the coboundary matrix of every dimension present in `c`.
    pub fn new(c: &FilteredComplex) -> Self {
        Self::with_min_dim(c, 0)
    }

    /// Reduces the coboundary matrix restricted to cosimplices of dimension
    /// at least `min_dim`. With `min_dim = 1` only cochains of dimension two
    /// and above can be certified as coboundaries.
    pub fn with_min_dim(c: &FilteredComplex, min_dim: usize) -> Self {
        let basis = CoboundaryBasis::new(c, min_dim);
        let a = build_coboundary(c, &basis);
        let reduction = column_reduce_by_dimension(&a, basis.dims());
        let u = row_reduce(&reduction.r);
        let stage_sizes = c
            .critical_values()
            .iter()
            .map(|&t| (t, basis.stage_size(t)))
            .collect();
        ReducedCoboundary {
            basis,
            reduction,
            u,
            stage_sizes,
        }
    }

    pub fn basis(&self) -> &CoboundaryBasis {
        &self.basis
    }

    pub fn a(&self) -> &SparseZ2Matrix {
        &self.reduction.a
    }

    pub fn r(&self) -> &SparseZ2Matrix {
        &self.reduction.r
    }

    pub fn v(&self) -> &SparseZ2Matrix {
        &self.reduction.v
    }

    pub fn u(&self) -> &SparseZ2Matrix {
        &self.u
    }

    pub fn reduction(&self) -> &ColumnReduction {
        &self.reduction
    }

    pub fn pivots(&self) -> Vec<u32> {
        self.reduction.pivots()
    }

    /// For each critical value, the number of indexed simplices alive there.
    pub fn stage_sizes(&self) -> &[(f64, usize)] {
        &self.stage_sizes
    }

    /// Matrix positions of the summands of `sigma`, after checking that each
    /// is alive at `t`.
    pub fn positions(
        &self,
        sigma: &Cochain,
        t: f64,
        c: &FilteredComplex,
    ) -> Result<Vec<u32>, CoboundaryError> {
        let mut out = Vec::with_capacity(sigma.len());
        for s in sigma.summands() {
            let i = c
                .index_of(s)
                .ok_or_else(|| CoboundaryError::UnknownSimplex(s.clone()))?;
            if c.grade(i) > t {
                return Err(CoboundaryError::SimplexNotAlive {
                    simplex: s.clone(),
                    t,
                });
            }
            let pos = self
                .basis
                .position_of(i)
                .ok_or_else(|| CoboundaryError::DimensionNotIndexed(s.clone()))?;
            out.push(pos);
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Whether the restriction of `sigma` to `X_t` is a coboundary there.
    pub fn is_coboundary(
        &self,
        sigma: &Cochain,
        t: f64,
        c: &FilteredComplex,
    ) -> Result<bool, CoboundaryError> {
        let pos = self.positions(sigma, t, c)?;
        Ok(self.is_coboundary_at_block(&pos, self.basis.block_start(t)))
    }

    /// Coboundary test on positions that all lie in the trailing block
    /// starting at `block_start`: the non-zero rows of `U·y` inside the block
    /// must all be pivot rows.
    pub fn is_coboundary_at_block(&self, positions: &[u32], block_start: usize) -> bool {
        let mut acc = Vec::new();
        for &k in positions {
            debug_assert!(k as usize >= block_start);
            acc.extend(
                self.u
                    .column(k as usize)
                    .iter()
                    .copied()
                    .filter(|&i| i as usize >= block_start),
            );
        }
        odd_entries(acc)
            .into_iter()
            .all(|i| self.reduction.is_pivot(i))
    }
}

/// Free-function form of [`ReducedCoboundary::is_coboundary`].
pub fn is_coboundary(
    sigma: &Cochain,
    t: f64,
    rc: &ReducedCoboundary,
    c: &FilteredComplex,
) -> Result<bool, CoboundaryError> {
    rc.is_coboundary(sigma, t, c)
}
