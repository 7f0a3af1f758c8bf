use std::f64::consts::PI;

use num_complex::Complex64;

use super::matrix::{determinant_in_place, ComplexMatrix};
use super::polynomial::Polynomial;
use super::PolyMatrixFamily;
use crate::error::{Error, Result};

/// Monic characteristic polynomial `det(λI - M(z))`.
///
/// `coeffs[k]` is the coefficient of `λ^k`, itself a polynomial in `z`;
/// `coeffs[n]` is the constant polynomial 1.
#[derive(Clone, Debug, PartialEq)]
pub struct CharPoly {
    coeffs: Vec<Polynomial>,
}

impl CharPoly {
    pub(crate) fn of_family(family: &PolyMatrixFamily) -> Self {
        let n = family.dim();
        let a = family.rows();
        // Faddeev–LeVerrier: M_0 = 0, c_n = 1,
        //   M_k = A M_{k-1} + c_{n-k+1} I,  c_{n-k} = -tr(A M_k) / k.
        let mut coeffs = vec![Polynomial::zero(); n + 1];
        coeffs[n] = Polynomial::one();
        let mut m = vec![vec![Polynomial::zero(); n]; n];
        for k in 1..=n {
            let mut next = poly_mat_mul(&a, &m);
            for (i, row) in next.iter_mut().enumerate() {
                row[i] = &row[i] + &coeffs[n - k + 1];
            }
            let am = poly_mat_mul(&a, &next);
            let trace = (0..n).fold(Polynomial::zero(), |acc, i| &acc + &am[i][i]);
            coeffs[n - k] = trace.scale(Complex64::new(-1.0 / k as f64, 0.0));
            m = next;
        }
        CharPoly { coeffs }
    }

    /// Builds a characteristic polynomial from explicit λ-coefficients.
    /// The leading one must be the constant 1.
    pub fn from_coeffs(coeffs: Vec<Polynomial>) -> Result<Self> {
        if coeffs.last() != Some(&Polynomial::one()) {
            return Err(Error::InvalidInput("characteristic polynomial must be monic".into()));
        }
        Ok(CharPoly { coeffs })
    }

    /// Degree in λ, equal to the matrix dimension.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Polynomial] {
        &self.coeffs
    }

    /// λ-coefficients at a fixed `z`, ascending.
    pub fn at(&self, z: Complex64) -> Vec<Complex64> {
        self.coeffs.iter().map(|p| p.eval(z)).collect()
    }

    /// `p(λ; z)`.
    pub fn eval(&self, z: Complex64, lambda: Complex64) -> Complex64 {
        self.at(z)
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * lambda + c)
    }

    /// Per-entry degree bound recovered from the λ-coefficients: the
    /// coefficient of `λ^{n-k}` has `z`-degree at most `k * d`.
    pub fn entry_degree_bound(&self) -> usize {
        let n = self.degree();
        (1..=n)
            .map(|k| {
                let d = self.coeffs[n - k].degree().max(0) as usize;
                d.div_ceil(k)
            })
            .max()
            .unwrap_or(0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(Polynomial::max_abs_coeff).fold(0.0, f64::max)
    }
}

fn poly_mat_mul(a: &[Vec<Polynomial>], b: &[Vec<Polynomial>]) -> Vec<Vec<Polynomial>> {
    let n = a.len();
    let mut out = vec![vec![Polynomial::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if b[k][j].is_zero() {
                    continue;
                }
                out[i][j] = &out[i][j] + &(&a[i][k] * &b[k][j]);
            }
        }
    }
    out
}

/// Numeric Faddeev–LeVerrier on a fixed matrix. Returns ascending
/// λ-coefficients of the monic characteristic polynomial.
pub fn numeric_char_poly(m: &ComplexMatrix) -> Vec<Complex64> {
    let n = m.dim();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    let mut acc = ComplexMatrix::zeros(n);
    for k in 1..=n {
        let mut next = m * &acc;
        next.add_scaled_identity(coeffs[n - k + 1]);
        coeffs[n - k] = -(m * &next).trace() / k as f64;
        acc = next;
    }
    coeffs
}

/// Discriminant of a polynomial given by ascending coefficients, computed as
/// `(-1)^{n(n-1)/2} Res(p, p') / a_n` from the Sylvester determinant.
pub fn discriminant_at(coeffs: &[Complex64]) -> Complex64 {
    let n = coeffs.len() - 1;
    if n < 1 {
        return Complex64::new(0.0, 0.0);
    }
    let lead = coeffs[n];
    // Descending coefficients of p and p'.
    let p: Vec<Complex64> = coeffs.iter().rev().copied().collect();
    let dp: Vec<Complex64> = (1..=n).rev().map(|k| coeffs[k] * k as f64).collect();
    let size = 2 * n - 1;
    let mut syl = vec![Complex64::new(0.0, 0.0); size * size];
    for row in 0..n - 1 {
        for (j, &c) in p.iter().enumerate() {
            syl[row * size + row + j] = c;
        }
    }
    for row in 0..n {
        for (j, &c) in dp.iter().enumerate() {
            syl[(n - 1 + row) * size + row + j] = c;
        }
    }
    let res = determinant_in_place(size, syl);
    let sign = if (n * (n - 1) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    res * sign / lead
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscriminantOptions {
    /// Relative trimming tolerance for the interpolated coefficients.
    pub trim_tol: f64,
    /// Maximum relative residual at off-grid check points.
    pub residual_tol: f64,
}

impl Default for DiscriminantOptions {
    fn default() -> Self {
        DiscriminantOptions { trim_tol: 1e-8, residual_tol: 1e-8 }
    }
}

pub fn discriminant(cp: &CharPoly) -> Result<Polynomial> {
    discriminant_with(cp, &DiscriminantOptions::default())
}

/// Discriminant of `cp` in λ as a polynomial in `z`, by evaluation at
/// `D + 1` points on a circle followed by interpolation.
///
/// `D = n(n-1) d` bounds the degree. Sampling at scaled roots of unity turns
/// the Vandermonde solve into a discrete Fourier transform. The interpolant
/// is checked against direct evaluation at points off the sampling grid.
pub fn discriminant_with(cp: &CharPoly, opts: &DiscriminantOptions) -> Result<Polynomial> {
    let n = cp.degree();
    if n < 2 {
        return Err(Error::InvalidInput("discriminant needs degree at least 2".into()));
    }
    let bound = n * (n - 1) * cp.entry_degree_bound();
    let radius = cp.max_abs_coeff().max(1.0);
    let count = bound + 1;

    let nodes: Vec<Complex64> = (0..count)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / count as f64))
        .collect();
    let mut natural_scale = 1.0f64;
    let values: Vec<Complex64> = nodes
        .iter()
        .map(|&z| {
            let c = cp.at(z);
            natural_scale = natural_scale.max(c.iter().map(|x| x.norm()).fold(0.0, f64::max));
            discriminant_at(&c)
        })
        .collect();

    // Homogeneous of degree 2n-2 in the coefficients.
    let magnitude = natural_scale.powi(2 * n as i32 - 2);
    if values.iter().all(|v| v.norm() <= 1e-10 * magnitude) {
        return Ok(Polynomial::zero());
    }

    let coeffs: Vec<Complex64> = (0..count)
        .map(|j| {
            let sum: Complex64 = values
                .iter()
                .enumerate()
                .map(|(k, &v)| {
                    v * Complex64::from_polar(1.0, -2.0 * PI * ((j * k) % count) as f64 / count as f64)
                })
                .sum();
            sum / count as f64 / radius.powi(j as i32)
        })
        .collect();
    let interpolant = Polynomial::new(coeffs);

    let mut worst = 0.0f64;
    for (k, shrink) in [(0usize, 0.5), (1, 0.83), (2, 1.0)] {
        let angle = PI * (2 * k + 1) as f64 / count as f64 + 0.37;
        let z = Complex64::from_polar(radius * shrink, angle);
        let direct = discriminant_at(&cp.at(z));
        let scale: f64 = interpolant
            .coeffs()
            .iter()
            .enumerate()
            .map(|(j, c)| c.norm() * z.norm().powi(j as i32))
            .sum::<f64>()
            .max(direct.norm())
            .max(f64::MIN_POSITIVE);
        worst = worst.max((interpolant.eval(z) - direct).norm() / scale);
    }
    if worst > opts.residual_tol {
        return Err(Error::InterpolationIllConditioned { residual: worst });
    }
    Ok(interpolant.trimmed(opts.trim_tol))
}
