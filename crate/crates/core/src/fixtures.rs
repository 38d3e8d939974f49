//! Small filtrations with known cohomology, plus a seeded generator of
//! random filtrations.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

use crate::complex::{build_vietoris_rips, FilteredComplex, Vertex};

/// Closes a list of graded simplices under faces. A face gets the smallest
/// grade of the listed simplices containing it.
pub fn closure<I: IntoIterator<Item = (Vec<Vertex>, f64)>>(maximal: I) -> FilteredComplex {
    let mut grades: HashMap<Vec<Vertex>, f64> = HashMap::new();
    for (mut s, g) in maximal {
        s.sort_unstable();
        let n = s.len();
        for mask in 1u32..(1 << n) {
            let face: Vec<Vertex> = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| s[i]).collect();
            let slot = grades.entry(face).or_insert(g);
            *slot = slot.min(g);
        }
    }
    FilteredComplex::from_simplex_list(grades).expect("closure is a valid filtration")
}

/// The boundary of a triangle at grade 0.
pub fn hollow_triangle() -> FilteredComplex {
    closure([(vec![0, 1], 0.0), (vec![0, 2], 0.0), (vec![1, 2], 0.0)])
}

/// A hollow triangle at grade 0 whose 2-simplex arrives at grade 1.
pub fn filled_triangle() -> FilteredComplex {
    closure([
        (vec![0, 1], 0.0),
        (vec![0, 2], 0.0),
        (vec![1, 2], 0.0),
        (vec![0, 1, 2], 1.0),
    ])
}

/// Circle A at 0, disjoint circle B at 1, A filled at 2, B filled at 3.
pub fn two_disks() -> FilteredComplex {
    closure([
        (vec![0, 1], 0.0),
        (vec![0, 2], 0.0),
        (vec![1, 2], 0.0),
        (vec![3, 4], 1.0),
        (vec![3, 5], 1.0),
        (vec![4, 5], 1.0),
        (vec![0, 1, 2], 2.0),
        (vec![3, 4, 5], 3.0),
    ])
}

/// Pairwise distances between the corners of the unit square, in cyclic order.
pub fn unit_square_distances() -> Vec<Vec<f64>> {
    let s = 2f64.sqrt();
    vec![
        vec![0.0, 1.0, s, 1.0],
        vec![1.0, 0.0, 1.0, s],
        vec![s, 1.0, 0.0, 1.0],
        vec![1.0, s, 1.0, 0.0],
    ]
}

/// Vietoris-Rips filtration of the unit square up to dimension `k + 1`.
pub fn square_vr(k: usize) -> FilteredComplex {
    build_vietoris_rips(&unit_square_distances(), k + 1, f64::INFINITY).expect("valid distances")
}

/// The 6-vertex real projective plane at grade 0.
pub fn rp2() -> FilteredComplex {
    const TRIANGLES: [[Vertex; 3]; 10] = [
        [0, 1, 2],
        [0, 2, 3],
        [0, 3, 4],
        [0, 4, 5],
        [0, 1, 5],
        [1, 2, 4],
        [1, 3, 4],
        [1, 3, 5],
        [2, 3, 5],
        [2, 4, 5],
    ];
    closure(TRIANGLES.iter().map(|t| (t.to_vec(), 0.0)))
}

/// The 7-vertex torus at grade 0.
pub fn torus7() -> FilteredComplex {
    let tris = (0..7u32).flat_map(|i| [vec![i, (i + 1) % 7, (i + 3) % 7], vec![i, (i + 2) % 7, (i + 3) % 7]]);
    closure(tris.map(|t| (t, 0.0)))
}

/// A filtration whose stages are, in order: a point at 0, a one-sided
/// circle `C` at 1, a Klein bottle containing `C` at 2, and at 3 the Klein
/// bottle with a disk glued along `C`.
///
/// The Klein bottle is a 4×4 grid of squares, periodic in the second
/// coordinate and glued to itself with a flip in the first. `C` is the
/// middle row, which the flip maps to itself.
pub fn klein() -> FilteredComplex {
    const N: u32 = 4;
    const M: u32 = 4;
    let vertex = |i: u32, j: u32| -> Vertex {
        let j = j % M;
        if i == N {
            (M - j) % M
        } else {
            i * M + j
        }
    };
    let row = M / 2;
    let on_circle = |s: &[Vertex]| s.iter().all(|&v| v % M == row);
    let mut simplices: Vec<(Vec<Vertex>, f64)> = Vec::new();
    for i in 0..N {
        for j in 0..M {
            let (a, b, c, d) = (vertex(i, j), vertex(i + 1, j), vertex(i, j + 1), vertex(i + 1, j + 1));
            simplices.push((vec![a, b, d], 2.0));
            simplices.push((vec![a, c, d], 2.0));
            let edge = vec![a, b];
            if on_circle(&edge) {
                simplices.push((edge, 1.0));
            }
        }
    }
    let apex = N * M;
    for i in 0..N {
        let (a, b) = (vertex(i, row), vertex(i + 1, row));
        simplices.push((vec![a, b, apex], 3.0));
    }
    simplices.push((vec![vertex(0, row)], 0.0));
    closure(simplices)
}

/// Positive-dimensional simplex budget of [`random_filtration`].
pub const RANDOM_MAX_POSITIVE: usize = 25;

/// A random filtration with at most [`RANDOM_MAX_POSITIVE`] positive-dimensional
/// simplices, dimension at most 3 and grades in `{0, 1, 2, 3}`, together
/// with a degree bound `k` for which it is already truncated.
pub fn random_filtration(seed: u64) -> (FilteredComplex, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let maximal: Vec<Vec<Vertex>> = match rng.gen_range(0..4) {
            0 => {
                let mut tris: Vec<Vec<Vertex>> = rp2()
                    .simplices()
                    .iter()
                    .filter(|s| s.dim() == 2)
                    .map(|s| s.vertices().to_vec())
                    .collect();
                tris.shuffle(&mut rng);
                tris.truncate(rng.gen_range(6..=10));
                tris
            }
            1 => {
                let n = rng.gen_range(5..=7);
                (0..rng.gen_range(3..=7))
                    .map(|_| {
                        let mut vs: Vec<Vertex> = (0..n).collect();
                        vs.shuffle(&mut rng);
                        vs.truncate(rng.gen_range(2..=3));
                        vs
                    })
                    .collect()
            }
            _ => {
                let n = rng.gen_range(4..=6);
                (0..rng.gen_range(2..=5))
                    .map(|_| {
                        let mut vs: Vec<Vertex> = (0..n).collect();
                        vs.shuffle(&mut rng);
                        vs.truncate(rng.gen_range(2..=4));
                        vs
                    })
                    .collect()
            }
        };
        let skeleton = closure(maximal.into_iter().map(|s| (s, 0.0)));
        if skeleton.count_positive_dim() > RANDOM_MAX_POSITIVE {
            continue;
        }
        // Random grades pushed up along faces to keep them monotone.
        let mut graded: HashMap<Vec<Vertex>, f64> = HashMap::new();
        for s in skeleton.simplices() {
            let mut g = rng.gen_range(0..4) as f64;
            if s.dim() == 0 && rng.gen_bool(0.5) {
                g = 0.0;
            }
            for f in s.facets() {
                g = g.max(graded[f.vertices()]);
            }
            graded.insert(s.vertices().to_vec(), g);
        }
        let c = FilteredComplex::from_simplex_list(graded).expect("monotone by construction");
        let k = *[1, 2, 2, 3].choose(&mut rng).unwrap();
        return (c.truncate(k + 1), k);
    }
}
