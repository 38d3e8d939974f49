//! Brute-force ground truth for small complexes.
//!
//! Everything here works with dense bit vectors over the simplices of a
//! stage and plain Gaussian elimination; nothing is shared with the sparse
//! reduction used by the main pipeline. Cup products are evaluated
//! simplex by simplex through the front-face/back-face formula.

use thiserror::Error;

use crate::complex::{Cochain, FilteredComplex};
use crate::invariants::{CupFunction, Interval};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("{0} is not a critical value of the filtration")]
    NotCriticalValue(f64),
    #[error("parameters are out of order: {t} > {s}")]
    Unordered { t: f64, s: f64 },
}

#[derive(Clone, PartialEq, Eq, Debug)]
struct Bits(Vec<u64>);

impl Bits {
    fn zeros(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn flip(&mut self, i: usize) {
        self.0[i / 64] ^= 1 << (i % 64);
    }

    fn xor(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }

    fn highest(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| i * 64 + b)
        })
    }

    fn truncated(&self, n: usize) -> Bits {
        let mut out = Bits::zeros(n);
        for i in self.ones().take_while(|&i| i < n) {
            out.flip(i);
        }
        out
    }
}

/// Row-echelon basis of a subspace, keyed by highest set bit.
struct Echelon {
    rows: Vec<Option<Bits>>,
}

impl Echelon {
    fn new(n: usize) -> Self {
        Echelon { rows: vec![None; n] }
    }

    fn reduce(&self, mut v: Bits) -> Bits {
        while let Some(h) = v.highest() {
            match &self.rows[h] {
                Some(r) => v.xor(r),
                None => break,
            }
        }
        v
    }

    /// Inserts `v`; returns false if it was already in the span.
    fn insert(&mut self, v: Bits) -> bool {
        let r = self.reduce(v);
        match r.highest() {
            Some(h) => {
                self.rows[h] = Some(r);
                true
            }
            None => false,
        }
    }

    fn contains(&self, v: &Bits) -> bool {
        self.reduce(v.clone()).highest().is_none()
    }
}

/// One stage `X_t`: the first `n` simplices of the complex.
struct Stage<'a> {
    c: &'a FilteredComplex,
    n: usize,
    cofaces: Vec<Vec<usize>>,
}

impl<'a> Stage<'a> {
    fn new(c: &'a FilteredComplex, t: f64) -> Self {
        let n = c.count_alive(t);
        let mut cofaces = vec![Vec::new(); n];
        for tau in 0..n {
            for face in c.simplex(tau).facets() {
                cofaces[c.index_of(&face).unwrap()].push(tau);
            }
        }
        Stage { c, n, cofaces }
    }

    fn of_dim(&self, p: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| self.c.simplex(i).dim() == p)
    }

    fn coboundary_of(&self, i: usize) -> Bits {
        let mut b = Bits::zeros(self.n);
        for &tau in &self.cofaces[i] {
            b.flip(tau);
        }
        b
    }

    fn coboundaries(&self, p: usize) -> Echelon {
        let mut e = Echelon::new(self.n);
        if p > 0 {
            for i in self.of_dim(p - 1) {
                e.insert(self.coboundary_of(i));
            }
        }
        e
    }

    /// A basis of `H^p` as cocycle bit vectors.
    fn cohomology(&self, p: usize) -> Vec<Bits> {
        // Kernel of δ^p: eliminate the coboundaries of the p-cosimplices
        // while tracking which cosimplices were combined.
        let mut pivots: Vec<Option<(Bits, Bits)>> = vec![None; self.n];
        let mut cocycles = Vec::new();
        for i in self.of_dim(p) {
            let mut img = self.coboundary_of(i);
            let mut combo = Bits::zeros(self.n);
            combo.flip(i);
            loop {
                match img.highest() {
                    None => {
                        cocycles.push(combo);
                        break;
                    }
                    Some(h) => match &pivots[h] {
                        Some((pi, pc)) => {
                            img.xor(pi);
                            combo.xor(pc);
                        }
                        None => {
                            pivots[h] = Some((img, combo));
                            break;
                        }
                    },
                }
            }
        }
        let mut span = self.coboundaries(p);
        cocycles.into_iter().filter(|z| span.insert(z.clone())).collect()
    }

    fn cup(&self, a: &Bits, p: usize, b: &Bits, q: usize) -> Bits {
        let mut out = Bits::zeros(self.n);
        for tau in self.of_dim(p + q) {
            let v = self.c.simplex(tau).vertices();
            let front = self.c.index_of_vertices(&v[..=p]).unwrap();
            let back = self.c.index_of_vertices(&v[p..]).unwrap();
            if a.get(front) && b.get(back) {
                out.flip(tau);
            }
        }
        out
    }

    fn to_cochain(&self, bits: &Bits, p: usize) -> Cochain {
        Cochain::from_simplices(p, bits.ones().map(|i| self.c.simplex(i).clone())).unwrap()
    }
}

/// Bases of `H^p(X_t)` for `p = 0..=k`.
#[derive(Clone, Debug, PartialEq)]
pub struct CohomBasis {
    pub t: f64,
    reps: Vec<Vec<Cochain>>,
}

impl CohomBasis {
    pub fn reps(&self, p: usize) -> &[Cochain] {
        &self.reps[p]
    }

    pub fn dim(&self, p: usize) -> usize {
        self.reps.get(p).map_or(0, Vec::len)
    }

    /// Betti numbers indexed by degree.
    pub fn dims(&self) -> Vec<usize> {
        self.reps.iter().map(Vec::len).collect()
    }
}

pub fn cohomology_basis(c: &FilteredComplex, t: f64, k: usize) -> CohomBasis {
    let stage = Stage::new(c, t);
    let reps = (0..=k)
        .map(|p| stage.cohomology(p).iter().map(|z| stage.to_cochain(z, p)).collect())
        .collect();
    CohomBasis { t, reps }
}

fn check_critical(c: &FilteredComplex, t: f64) -> Result<(), OracleError> {
    if c.critical_values().contains(&t) {
        Ok(())
    } else {
        Err(OracleError::NotCriticalValue(t))
    }
}

/// Cup-length of the image of `H*(X_s) → H*(X_t)`, counting products of
/// total degree at most `k`.
pub fn image_cup_length(c: &FilteredComplex, t: f64, s: f64, k: usize) -> Result<usize, OracleError> {
    check_critical(c, t)?;
    check_critical(c, s)?;
    if t > s {
        return Err(OracleError::Unordered { t, s });
    }
    let big = Stage::new(c, s);
    let small = Stage::new(c, t);
    let mut gens: Vec<(Bits, usize)> = Vec::new();
    for p in 1..=k {
        for z in big.cohomology(p) {
            gens.push((z.truncated(small.n), p));
        }
    }
    let spans: Vec<Echelon> = (0..=k).map(|p| small.coboundaries(p)).collect();
    let nonzero = |v: &Bits, p: usize| !spans[p].contains(v);

    fn search(
        small: &Stage,
        gens: &[(Bits, usize)],
        nonzero: &dyn Fn(&Bits, usize) -> bool,
        k: usize,
        start: usize,
        current: &Bits,
        dim: usize,
        depth: usize,
        best: &mut usize,
    ) {
        for (i, (g, p)) in gens.iter().enumerate().skip(start) {
            if *best >= k {
                return;
            }
            if dim + p > k {
                continue;
            }
            let prod = small.cup(current, dim, g, *p);
            if !nonzero(&prod, dim + p) {
                continue;
            }
            *best = (*best).max(depth + 1);
            search(small, gens, nonzero, k, i, &prod, dim + p, depth + 1, best);
        }
    }

    let mut best = 0;
    for (i, (g, p)) in gens.iter().enumerate() {
        if best >= k {
            break;
        }
        if !nonzero(g, *p) {
            continue;
        }
        best = best.max(1);
        search(&small, &gens, &nonzero, k, i, g, *p, 1, &mut best);
    }
    Ok(best)
}

/// `grid[i][j]` is the image cup-length for the `i`-th and `j`-th critical
/// values (`i ≤ j`); entries below the diagonal are zero.
pub fn cup_length_grid(c: &FilteredComplex, k: usize) -> Vec<Vec<usize>> {
    let cv = c.critical_values();
    let n = cv.len();
    let mut grid = vec![vec![0; n]; n];
    for i in 0..n {
        for j in i..n {
            grid[i][j] = image_cup_length(c, cv[i], cv[j], k).expect("critical values");
        }
    }
    grid
}

/// The persistent cup-length function computed stage by stage. A grid cell
/// `(i, j)` becomes the generator `[c_i, c_{j+1})`, or `[c_i, ∞)` on the last
/// column, when its value exceeds those of the two cells just outside it.
pub fn oracle_cup_function(c: &FilteredComplex, k: usize) -> CupFunction {
    let cv = c.critical_values();
    let grid = cup_length_grid(c, k);
    let n = cv.len();
    let mut gens = Vec::new();
    for i in 0..n {
        for j in i..n {
            let v = grid[i][j];
            if v == 0 {
                continue;
            }
            let wider_left = if i > 0 { grid[i - 1][j] } else { 0 };
            let wider_right = if j + 1 < n { grid[i][j + 1] } else { 0 };
            if v > wider_left && v > wider_right {
                let right = cv.get(j + 1).copied().unwrap_or(f64::INFINITY);
                gens.push((Interval::closed_open(cv[i], right), v as u32));
            }
        }
    }
    CupFunction::new(gens)
}
