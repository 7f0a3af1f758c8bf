use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RootOptions {
    pub max_iter: usize,
    /// Seed for the perturbation of the initial circle.
    pub seed: u64,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions { max_iter: 200, seed: 0 }
    }
}

/// All roots of the polynomial with ascending coefficients `coeffs`.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    poly_roots_with(coeffs, &RootOptions::default(), None)
}

/// Aberth–Ehrlich simultaneous iteration.
///
/// Starts from `guess` when it holds `deg` pairwise distinct values, otherwise
/// from a seeded, perturbed circle of Fujiwara radius. Every returned root `r`
/// satisfies `|p(r)| <= 1e-10 * max|a_k| * max(1,|r|)^deg` with `p` monic.
pub fn poly_roots_with(
    coeffs: &[Complex64],
    opts: &RootOptions,
    guess: Option<&[Complex64]>,
) -> Result<Vec<Complex64>> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Err(Error::InvalidInput("root finding needs degree at least 1".into()));
    }
    let lead = coeffs[n];
    if lead.norm() == 0.0 || !lead.is_finite() {
        return Err(Error::InvalidInput("leading coefficient must be nonzero".into()));
    }
    let monic: Vec<Complex64> = coeffs.iter().map(|&c| c / lead).collect();
    if n == 1 {
        return Ok(vec![-monic[0]]);
    }

    let mut z = match guess {
        Some(g) if g.len() == n && crate::assignment::min_separation(g) > 0.0 => g.to_vec(),
        _ => initial_circle(&monic, opts.seed),
    };

    let mut it = 0;
    while it < opts.max_iter {
        it += 1;
        let mut biggest = 0.0f64;
        for i in 0..n {
            let (p, dp) = horner_with_derivative(&monic, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let denom = dp - p * repulsion;
            if denom.norm() == 0.0 || !denom.is_finite() {
                continue;
            }
            let step = p / denom;
            z[i] -= step;
            biggest = biggest.max(step.norm() / z[i].norm().max(1.0));
        }
        if z.iter().any(|r| !r.is_finite()) {
            return Err(Error::NoConvergence { iterations: it });
        }
        if biggest <= 4.0 * f64::EPSILON {
            break;
        }
    }

    let scale = monic.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let ok = z.iter().all(|&r| {
        let (p, _) = horner_with_derivative(&monic, r);
        p.norm() <= 1e-10 * scale * r.norm().max(1.0).powi(n as i32)
    });
    if !ok {
        return Err(Error::NoConvergence { iterations: it });
    }
    Ok(z)
}

fn horner_with_derivative(coeffs: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

fn initial_circle(monic: &[Complex64], seed: u64) -> Vec<Complex64> {
    let n = monic.len() - 1;
    // Fujiwara bound on root moduli.
    let radius = (0..n)
        .map(|k| {
            let c = monic[k].norm();
            let c = if k == 0 { c / 2.0 } else { c };
            c.powf(1.0 / (n - k) as f64)
        })
        .fold(0.0, f64::max)
        * 2.0;
    let radius = if radius > 0.0 { radius } else { 1.0 };
    let center = -monic[n - 1] / n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|k| {
            let angle = TAU * k as f64 / n as f64 + 0.4 + rng.gen_range(-0.1..0.1);
            let r = radius * (1.0 + rng.gen_range(-0.05..0.05));
            center + Complex64::from_polar(r, angle)
        })
        .collect()
}
