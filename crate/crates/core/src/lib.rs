//! Persistent cup-length invariants of filtered simplicial complexes over Z/2.
//!
//! The pipeline runs [`complex`] → [`cohomology`] → [`cupalg`] →
//! [`invariants`]: build or load a filtration, compute a barcode with
//! representative cocycles, form cup products of representatives to get the
//! cup-length diagram, and read the cup-length function off the diagram.
//! [`oracle`] recomputes the function by brute force for cross-checking.

pub mod cohomology;
pub mod complex;
pub mod cupalg;
pub mod fixtures;
pub mod invariants;
pub mod oracle;
pub mod z2linalg;

pub use cohomology::{compute_barcode, validate_family, AnnotatedBarcode, Bar, Death};
pub use complex::{build_vietoris_rips, Cochain, ComplexError, FilteredComplex, Simplex};
pub use cupalg::{cup_diagram, cup_product, CupDiagram, CupDiagramOptions, RunStats};
pub use invariants::{erosion_distance, reconstruct, CupFunction, Interval};

/// Truncates `c` to dimension `k + 1`, then computes its barcode and
/// cup-length diagram with a single matrix reduction.
pub fn run_pipeline(
    c: &FilteredComplex,
    k: usize,
    opts: CupDiagramOptions,
) -> (FilteredComplex, AnnotatedBarcode, CupDiagram, RunStats) {
    let c = c.truncate(k + 1);
    let rc = z2linalg::ReducedCoboundary::new(&c);
    let b = cohomology::compute_barcode_with(&c, k, &rc);
    let (d, stats) = cupalg::cup_diagram_with(&b, &c, &rc, k, opts);
    (c, b, d, stats)
}
