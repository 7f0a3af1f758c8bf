//! Matrix families `M(z)` with polynomial entries, their characteristic
//! polynomials, and the discriminant whose roots are the degeneracy
//! candidates in the parameter plane.

mod char_poly;
mod matrix;
mod polynomial;

use num_complex::Complex64;

pub use self::char_poly::{
    discriminant, discriminant_at, discriminant_with, numeric_char_poly, CharPoly,
    DiscriminantOptions,
};
pub use self::matrix::ComplexMatrix;
pub use self::polynomial::Polynomial;

use crate::error::{Error, Result};

/// `n x n` matrix whose entries are polynomials in one complex parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrixFamily {
    dim: usize,
    entries: Vec<Polynomial>,
}

impl PolyMatrixFamily {
    pub fn new(entries: Vec<Vec<Polynomial>>) -> Result<Self> {
        let dim = entries.len();
        if dim == 0 {
            return Err(Error::InvalidInput("family dimension must be at least 1".into()));
        }
        if let Some(bad) = entries.iter().position(|row| row.len() != dim) {
            return Err(Error::InvalidInput(format!(
                "family row {bad} has {} entries, expected {dim}",
                entries[bad].len()
            )));
        }
        Ok(PolyMatrixFamily {
            dim,
            entries: entries.into_iter().flatten().collect(),
        })
    }

    /// Constant-plus-linear family `A + z B`.
    pub fn affine(constant: &ComplexMatrix, linear: &ComplexMatrix) -> Result<Self> {
        if constant.dim() != linear.dim() {
            return Err(Error::InvalidInput("affine family parts differ in size".into()));
        }
        let n = constant.dim();
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| Polynomial::new(vec![constant[(i, j)], linear[(i, j)]]))
                    .collect()
            })
            .collect();
        Self::new(rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<Polynomial>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    /// Largest entry degree, 0 when all entries are constant or zero.
    pub fn max_degree(&self) -> usize {
        self.entries.iter().map(|p| p.degree().max(0) as usize).max().unwrap_or(0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.entries.iter().map(Polynomial::max_abs_coeff).fold(0.0, f64::max)
    }

    pub fn evaluate(&self, z: Complex64) -> ComplexMatrix {
        let rows = self
            .entries
            .chunks(self.dim)
            .map(|r| r.iter().map(|p| p.eval(z)).collect())
            .collect();
        ComplexMatrix::from_rows(rows).expect("family grid is square")
    }

    /// `det(λI - M(z))` by Faddeev–LeVerrier recursion over the polynomial ring.
    pub fn char_poly(&self) -> CharPoly {
        CharPoly::of_family(self)
    }

    /// Sum of diagonal entries as a polynomial in `z`.
    pub fn trace(&self) -> Polynomial {
        (0..self.dim).fold(Polynomial::zero(), |acc, i| &acc + self.entry(i, i))
    }
}

/// The matrix families used throughout the tests and shipped scenarios.
pub mod fixtures {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lin(a: f64, b: f64) -> Polynomial {
        Polynomial::from_real(&[a, b])
    }

    /// `diag(z, -z)`: eigenvalues `±z`, a diagonalizable crossing at 0.
    pub fn diagonal_pair() -> PolyMatrixFamily {
        PolyMatrixFamily::new(vec![
            vec![lin(0.0, 1.0), Polynomial::zero()],
            vec![Polynomial::zero(), lin(0.0, -1.0)],
        ])
        .unwrap()
    }

    /// `[[1, z, 0], [z, -1, 0], [0, 0, 2z]]`: eigenvalues `±sqrt(1+z²)` and
    /// `2z`, with branch points at `±i` and diagonalizable crossings at
    /// `±1/sqrt(3)`.
    pub fn ep2_plus_level() -> PolyMatrixFamily {
        PolyMatrixFamily::new(vec![
            vec![lin(1.0, 0.0), lin(0.0, 1.0), Polynomial::zero()],
            vec![lin(0.0, 1.0), lin(-1.0, 0.0), Polynomial::zero()],
            vec![Polynomial::zero(), Polynomial::zero(), lin(0.0, 2.0)],
        ])
        .unwrap()
    }

    /// Companion matrix of `λⁿ - z`: eigenvalues are the n-th roots of z.
    pub fn root_companion(n: usize) -> PolyMatrixFamily {
        let mut rows = vec![vec![Polynomial::zero(); n]; n];
        for (i, row) in rows.iter_mut().enumerate().take(n - 1) {
            row[i + 1] = Polynomial::one();
        }
        rows[n - 1][0] = Polynomial::var();
        PolyMatrixFamily::new(rows).unwrap()
    }

    /// Convenience for `z` values in tests.
    pub fn z(re: f64, im: f64) -> Complex64 {
        c(re, im)
    }
}
