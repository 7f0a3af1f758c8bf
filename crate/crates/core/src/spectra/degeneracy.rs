use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::roots::{poly_roots_with, RootOptions};
use crate::bc_method::{sort_values, TotalOrder};
use crate::error::{Error, Result};
use crate::matrix_family::{discriminant, PolyMatrixFamily, Polynomial};
use crate::monodromy::Permutation;
use crate::path_geometry::Loop;
use crate::tracking::{track, LabeledSpectrum, TrackOptions};

/// Discriminant roots closer than this are reported once.
pub const DEDUP_TOL: f64 = 1e-7;

/// Radius within which clustered roots are tested for being one multiple root.
const CLUSTER_TOL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Complex64,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Complex64, radius: f64) -> Self {
        Disk { center, radius }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() <= self.radius * (1.0 + 1e-12)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegeneracyKind {
    BranchPoint,
    TrivialCrossing,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegeneracyPoint {
    pub location: Complex64,
    pub kind: DegeneracyKind,
    /// Identity exactly when the point is a trivial crossing.
    pub local_permutation: Permutation,
    pub probe_radius: f64,
    /// Eigenvalues at the probe base point `location + probe_radius`, in the
    /// label order used by `local_permutation`.
    pub probe_labels: LabeledSpectrum,
}

/// Roots of the discriminant lying in `region`.
///
/// Aberth iteration resolves a multiple root only to about `eps^(1/m)`, so
/// nearby roots are merged into their centroid when the discriminant vanishes
/// there to working precision.
pub fn locate_degeneracies(family: &PolyMatrixFamily, region: &Disk) -> Result<Vec<Complex64>> {
    if !region.radius.is_finite() || region.radius < 0.0 {
        return Err(Error::InvalidInput("region radius must be finite and non-negative".into()));
    }
    if family.dim() < 2 {
        return Ok(Vec::new());
    }
    let disc = discriminant(&family.char_poly())?;
    if disc.is_zero() {
        return Err(Error::DiscriminantIdenticallyZero);
    }
    if disc.degree() < 1 {
        return Ok(Vec::new());
    }
    let roots = poly_roots_with(disc.coeffs(), &RootOptions::default(), None)?;
    let mut found: Vec<Complex64> = Vec::new();
    for group in linkage(&roots, |a, b| (a - b).norm() <= CLUSTER_TOL * a.norm().max(1.0)) {
        let centroid = group.iter().sum::<Complex64>() / group.len() as f64;
        if group.len() > 1 && vanishes_at(&disc, centroid) {
            found.push(centroid);
        } else {
            for sub in linkage(&group, |a, b| (a - b).norm() <= DEDUP_TOL) {
                found.push(sub.iter().sum::<Complex64>() / sub.len() as f64);
            }
        }
    }
    found.retain(|&z| region.contains(z));
    found.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(found)
}

fn vanishes_at(p: &Polynomial, z: Complex64) -> bool {
    let scale: f64 = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm() * z.norm().max(1.0).powi(k as i32))
        .sum();
    p.eval(z).norm() <= 1e-13 * scale
}

/// Single-linkage clusters of `points` under `near`.
fn linkage(points: &[Complex64], near: impl Fn(Complex64, Complex64) -> bool) -> Vec<Vec<Complex64>> {
    let n = points.len();
    let mut group = vec![usize::MAX; n];
    let mut count = 0;
    for start in 0..n {
        if group[start] != usize::MAX {
            continue;
        }
        group[start] = count;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if group[j] == usize::MAX && near(points[i], points[j]) {
                    group[j] = count;
                    stack.push(j);
                }
            }
        }
        count += 1;
    }
    let mut out = vec![Vec::new(); count];
    for (i, &g) in group.iter().enumerate() {
        out[g].push(points[i]);
    }
    out
}

/// Cauchy bound on the moduli of all discriminant roots.
pub fn discriminant_root_bound(family: &PolyMatrixFamily) -> Result<f64> {
    if family.dim() < 2 {
        return Ok(1.0);
    }
    let disc = discriminant(&family.char_poly())?;
    if disc.is_zero() {
        return Err(Error::DiscriminantIdenticallyZero);
    }
    let c = disc.coeffs();
    let lead = c[c.len() - 1].norm();
    Ok(1.0 + c[..c.len() - 1].iter().map(|x| x.norm() / lead).fold(0.0, f64::max))
}

/// Half the distance from `z0` to the nearest other point, capped at 0.25.
pub fn default_probe_radius(z0: Complex64, others: &[Complex64]) -> f64 {
    others
        .iter()
        .map(|&p| (p - z0).norm())
        .filter(|&d| d > DEDUP_TOL)
        .fold(0.5, f64::min)
        / 2.0
}

/// Tracks once around the circle of radius `probe_radius` about `z0`.
pub fn classify_degeneracy(
    family: &PolyMatrixFamily,
    z0: Complex64,
    probe_radius: f64,
    opts: &TrackOptions,
) -> Result<DegeneracyPoint> {
    if !(probe_radius > 0.0 && probe_radius.is_finite()) {
        return Err(Error::InvalidInput("probe radius must be positive".into()));
    }
    let nearby = locate_degeneracies(family, &Disk::new(z0, 2.0 * probe_radius))?;
    if let Some(&other) = nearby.iter().find(|&&p| (p - z0).norm() > DEDUP_TOL) {
        return Err(Error::ProbeCircleContaminated { center: z0, other });
    }
    let lp = Loop::circle(z0, probe_radius, 0.0, 1)?;
    let mut labels = super::eigenvalues(&family.evaluate(lp.base_point()))?.values;
    sort_values(&mut labels, TotalOrder::ReThenIm);
    let probe_labels = LabeledSpectrum::new(labels);
    let local_permutation = track(family, lp.path(), &probe_labels, opts)?.permutation;
    let kind = if local_permutation.is_identity() {
        DegeneracyKind::TrivialCrossing
    } else {
        DegeneracyKind::BranchPoint
    };
    Ok(DegeneracyPoint { location: z0, kind, local_permutation, probe_radius, probe_labels })
}

/// Locates and classifies every degeneracy in `region` with default probe
/// radii.
pub fn degeneracy_census(
    family: &PolyMatrixFamily,
    region: &Disk,
    opts: &TrackOptions,
) -> Result<Vec<DegeneracyPoint>> {
    let points = locate_degeneracies(family, region)?;
    // Neighbours just outside the region still constrain the probe radius.
    let margin = Disk::new(region.center, region.radius + 1.0);
    let all = locate_degeneracies(family, &margin)?;
    points
        .iter()
        .map(|&z0| classify_degeneracy(family, z0, default_probe_radius(z0, &all), opts))
        .collect()
}
