//! Expected Betti numbers and Euler characteristics of random simplicial
//! complexes: exact enumeration oracles, reduced-polynomial coefficients
//! with their pruning rules, symmetry-reduced equal-probability
//! polynomials, and Vietoris–Rips construction from point clouds.

pub mod complex;
pub mod format;
pub mod geometry;
pub mod homology;
pub mod oracle;
pub mod pattern;
pub mod poly;
pub mod reduction;

pub use complex::{
    configuration_probability, rat, realize, Cell, ComplexError, Configuration, RandomComplex,
    Rat, SimplicialComplex,
};
pub use pattern::{canonical_form, automorphism_count, CanonicalForm, Pattern};
