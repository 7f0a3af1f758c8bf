//! Eigenvalue monodromy around exceptional points.
//!
//! Given a square matrix whose entries are polynomials in one complex
//! parameter `z`, this crate locates the parameter values where eigenvalues
//! coalesce, continues eigenvalues numerically along closed loops, and reads
//! off the permutation of eigenvalue labels each loop induces. Loops are
//! decomposed into keyhole generators of the fundamental group of the
//! punctured parameter plane, so the permutation of any based loop follows
//! from the generator permutations by composition.
//!
//! The [`bc_method`] module is a replica of the branch-cut plus global-sorting
//! procedure. It exists to reproduce that procedure's wrong answers next to the
//! tracked ground truth, and [`bc_method::compare_methods`] reports both.
//!
//! Permutations compose in path order throughout: `a.compose(&b)` means loop
//! `a` is traversed first, then loop `b`.

pub mod assignment;
pub mod bc_method;
pub mod cli;
pub mod error;
pub mod formats;
pub mod matrix_family;
pub mod monodromy;
pub mod path_geometry;
pub mod spectra;
pub mod tracking;

pub use num_complex::Complex64;

pub use crate::error::{Error, Result};
