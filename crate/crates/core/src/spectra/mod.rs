//! Eigenvalues of small dense matrices, polynomial roots, and the
//! degeneracy points of a family in the parameter plane.

mod degeneracy;
mod roots;

use num_complex::Complex64;
use serde::Serialize;

pub use self::degeneracy::{
    classify_degeneracy, default_probe_radius, degeneracy_census, discriminant_root_bound,
    locate_degeneracies, DegeneracyKind, DegeneracyPoint, Disk, DEDUP_TOL,
};
pub use self::roots::{poly_roots, poly_roots_with, RootOptions};

use crate::error::{Error, Result};
use crate::matrix_family::{numeric_char_poly, ComplexMatrix};

/// Largest matrix size accepted by [`eigenvalues`].
pub const MAX_DIM: usize = 12;

/// Unordered eigenvalues with their characteristic-polynomial residuals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum {
    pub values: Vec<Complex64>,
    pub residuals: Vec<f64>,
}

pub fn eigenvalues(m: &ComplexMatrix) -> Result<Spectrum> {
    eigenvalues_with(m, &RootOptions::default())
}

pub fn eigenvalues_with(m: &ComplexMatrix, opts: &RootOptions) -> Result<Spectrum> {
    if m.dim() > MAX_DIM {
        return Err(Error::InvalidInput(format!(
            "matrix size {} exceeds the limit of {MAX_DIM}",
            m.dim()
        )));
    }
    let coeffs = numeric_char_poly(m);
    let values = poly_roots_with(&coeffs, opts, None)?;
    let residuals = values
        .iter()
        .map(|&v| coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * v + c).norm())
        .collect();
    Ok(Spectrum { values, residuals })
}
