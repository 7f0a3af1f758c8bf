//! Eigenvalue continuation along paths.
//!
//! Labels are fixed once, at the start of the path. At every subsequent
//! sample the new eigenvalues are matched to the previous ordered list by
//! optimal assignment under absolute distance (not greedy nearest
//! neighbour, which can chain-misassign when two eigenvalues approach each
//! other). A step is accepted only when every assigned eigenvalue is at least
//! `safety` times closer than the runner-up; otherwise the step is bisected.
//! For a closed path the permutation is read off by matching the final
//! ordered list against the initial one.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::assignment::{distance_matrix, match_values, min_cost_assignment, min_separation, multiset_distance};
use crate::error::{Error, Result};
use crate::matrix_family::{CharPoly, PolyMatrixFamily};
use crate::monodromy::Permutation;
use crate::path_geometry::{Loop, Path};
use crate::spectra::{locate_degeneracies, poly_roots_with, Disk, RootOptions};

/// Eigenvalues in label order: position `k` carries label `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LabeledSpectrum {
    ordered: Vec<Complex64>,
}

impl LabeledSpectrum {
    pub fn new(ordered: Vec<Complex64>) -> Self {
        LabeledSpectrum { ordered }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.ordered
    }

    pub fn len(&self) -> usize {
        self.ordered.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordered.is_empty()
    }

    /// Label carrying the value nearest to `value`.
    pub fn label_of(&self, value: Complex64) -> usize {
        self.ordered
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - value).norm().total_cmp(&(b.1 - value).norm()))
            .map(|(k, _)| k)
            .unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackOptions {
    /// Sample spacing along arc length; `None` derives it from the distance
    /// between the path and the nearest degeneracy.
    pub max_step: Option<f64>,
    /// Required ratio between runner-up and assigned distance.
    pub safety: f64,
    /// Maximum nested bisections per sample interval.
    pub max_depth: u32,
    /// When positive, reject paths that pass closer than this to a degeneracy.
    pub min_clearance: f64,
    pub roots: RootOptions,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions {
            max_step: None,
            safety: 2.0,
            max_depth: 30,
            min_clearance: 0.0,
            roots: RootOptions::default(),
        }
    }
}

impl TrackOptions {
    pub fn with_max_step(self, max_step: f64) -> Self {
        TrackOptions { max_step: Some(max_step), ..self }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrackSample {
    /// Segment parameter along the path.
    pub param: f64,
    pub z: Complex64,
    pub ordered: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrackResult {
    /// For closed paths, `permutation[k]` is the base label at which the sheet
    /// that started with label `k` ends. Identity for open paths, whose
    /// labels are simply carried along.
    pub permutation: Permutation,
    pub samples: Vec<TrackSample>,
    /// Smallest eigenvalue separation seen at any accepted sample.
    pub min_gap: f64,
    /// Number of bisections performed.
    pub refinements: usize,
}

impl TrackResult {
    pub fn final_ordered(&self) -> &[Complex64] {
        &self.samples.last().expect("a track has at least one sample").ordered
    }

    /// Sheet data as CSV: `s_index, re_z, im_z, re_lambda_1, im_lambda_1, …`.
    pub fn to_csv(&self) -> Result<String> {
        let n = self.samples.first().map_or(0, |s| s.ordered.len());
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["s_index".to_string(), "re_z".into(), "im_z".into()];
        for k in 1..=n {
            header.push(format!("re_lambda_{k}"));
            header.push(format!("im_lambda_{k}"));
        }
        w.write_record(&header)?;
        for (i, s) in self.samples.iter().enumerate() {
            let mut row = vec![i.to_string(), s.z.re.to_string(), s.z.im.to_string()];
            for v in &s.ordered {
                row.push(v.re.to_string());
                row.push(v.im.to_string());
            }
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Continues `initial` along `path`.
pub fn track(
    family: &PolyMatrixFamily,
    path: &Path,
    initial: &LabeledSpectrum,
    opts: &TrackOptions,
) -> Result<TrackResult> {
    let mut tracker = Tracker::new(family, path, opts)?;
    let start = tracker.start_values(initial)?;

    let mut samples = vec![TrackSample { param: 0.0, z: path.start(), ordered: start.clone() }];
    let params = path.sample_params(tracker.max_step);
    let mut cur = start;
    for w in params.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        cur = tracker.advance(w[0], &cur, w[1], 0, Some(&mut samples))?;
    }

    let permutation = if path.is_closed() {
        closing_permutation(&cur, initial.values())?
    } else {
        Permutation::identity(initial.len())
    };
    Ok(TrackResult {
        permutation,
        samples,
        min_gap: tracker.min_gap,
        refinements: tracker.refinements,
    })
}

/// Permutation of base labels induced by continuing around `lp`.
pub fn loop_permutation(
    family: &PolyMatrixFamily,
    lp: &Loop,
    initial: &LabeledSpectrum,
    opts: &TrackOptions,
) -> Result<Permutation> {
    Ok(track(family, lp.path(), initial, opts)?.permutation)
}

/// `σ` with `values[k] ≈ labels[σ(k)]`: re-reads continued values in a target
/// labelling.
pub fn match_labels(values: &[Complex64], labels: &LabeledSpectrum) -> Result<Permutation> {
    closing_permutation(values, labels.values())
}

fn closing_permutation(values: &[Complex64], labels: &[Complex64]) -> Result<Permutation> {
    if values.len() != labels.len() {
        return Err(Error::SizeMismatch { left: values.len(), right: labels.len() });
    }
    let assign = match_values(values, labels);
    let worst = assign
        .iter()
        .enumerate()
        .map(|(k, &j)| (values[k] - labels[j]).norm())
        .fold(0.0, f64::max);
    let scale = labels.iter().map(|v| v.norm()).fold(1.0, f64::max);
    if worst > (0.25 * min_separation(labels)).min(1e-6 * scale) {
        return Err(Error::MultisetMismatch { deviation: worst });
    }
    Permutation::new(assign)
}

/// Default sample spacing: a sixteenth of the distance between the path and
/// the nearest degeneracy, floored at `1e-3`.
pub fn default_max_step(family: &PolyMatrixFamily, path: &Path) -> f64 {
    let (center, reach) = bounding_disk(path);
    let margin = reach.max(1.0);
    let clearance = match locate_degeneracies(family, &Disk::new(center, reach + margin)) {
        Ok(points) => points
            .iter()
            .map(|&p| path.distance_to(p))
            .fold(margin, f64::min),
        Err(_) => margin,
    };
    (clearance / 16.0).max(1e-3)
}

fn bounding_disk(path: &Path) -> (Complex64, f64) {
    let step = (path.length() / 256.0).max(1e-6);
    let pts: Vec<Complex64> = path
        .sample_params(step)
        .into_iter()
        .map(|u| path.point_at(u))
        .collect();
    let (mut lo, mut hi) = (pts[0], pts[0]);
    for p in &pts {
        lo = Complex64::new(lo.re.min(p.re), lo.im.min(p.im));
        hi = Complex64::new(hi.re.max(p.re), hi.im.max(p.im));
    }
    let center = (lo + hi) / 2.0;
    (center, (hi - center).norm() + step)
}

/// Stepwise continuation state shared by [`track`] and the relabeling
/// detector.
pub(crate) struct Tracker<'a> {
    cp: CharPoly,
    path: &'a Path,
    opts: TrackOptions,
    pub(crate) max_step: f64,
    pub(crate) min_gap: f64,
    pub(crate) refinements: usize,
}

impl<'a> Tracker<'a> {
    pub(crate) fn new(family: &PolyMatrixFamily, path: &'a Path, opts: &TrackOptions) -> Result<Self> {
        let max_step = match opts.max_step {
            Some(s) if s > 0.0 => s,
            Some(_) => return Err(Error::InvalidInput("max_step must be positive".into())),
            None => default_max_step(family, path),
        };
        if opts.min_clearance > 0.0 {
            let (center, reach) = bounding_disk(path);
            if let Ok(points) = locate_degeneracies(family, &Disk::new(center, reach + opts.min_clearance)) {
                for p in points {
                    let distance = path.distance_to(p);
                    if distance < opts.min_clearance {
                        return Err(Error::ClearanceViolated { degeneracy: p, distance });
                    }
                }
            }
        }
        Ok(Tracker {
            cp: family.char_poly(),
            path,
            opts: *opts,
            max_step,
            min_gap: f64::INFINITY,
            refinements: 0,
        })
    }

    pub(crate) fn spectrum_at(&self, z: Complex64, guess: Option<&[Complex64]>) -> Result<Vec<Complex64>> {
        poly_roots_with(&self.cp.at(z), &self.opts.roots, guess)
    }

    /// Fresh spectrum at the path start, ordered like `initial`.
    pub(crate) fn start_values(&mut self, initial: &LabeledSpectrum) -> Result<Vec<Complex64>> {
        let fresh = self.spectrum_at(self.path.start(), None)?;
        let scale = fresh.iter().map(|v| v.norm()).fold(1.0, f64::max);
        let deviation = multiset_distance(initial.values(), &fresh);
        if deviation > 1e-8 * scale {
            return Err(Error::MultisetMismatch { deviation });
        }
        let assign = match_values(initial.values(), &fresh);
        let start: Vec<Complex64> = assign.iter().map(|&j| fresh[j]).collect();
        self.min_gap = min_separation(&start);
        if self.min_gap == 0.0 {
            return Err(Error::StepUnderflow { z: self.path.start() });
        }
        Ok(start)
    }

    /// Continues `from` (ordered, at parameter `ua`) to parameter `ub`,
    /// bisecting on ambiguity.
    pub(crate) fn advance(
        &mut self,
        ua: f64,
        from: &[Complex64],
        ub: f64,
        depth: u32,
        mut samples: Option<&mut Vec<TrackSample>>,
    ) -> Result<Vec<Complex64>> {
        let z = self.path.point_at(ub);
        let fresh = self.spectrum_at(z, Some(from))?;
        if let Some(next) = self.try_match(from, &fresh) {
            self.min_gap = self.min_gap.min(min_separation(&next));
            if let Some(out) = samples {
                out.push(TrackSample { param: ub, z, ordered: next.clone() });
            }
            return Ok(next);
        }
        if depth >= self.opts.max_depth {
            return Err(Error::StepUnderflow { z });
        }
        self.refinements += 1;
        let mid = 0.5 * (ua + ub);
        let halfway = self.advance(ua, from, mid, depth + 1, samples.as_deref_mut())?;
        self.advance(mid, &halfway, ub, depth + 1, samples)
    }

    fn try_match(&self, prev: &[Complex64], fresh: &[Complex64]) -> Option<Vec<Complex64>> {
        if min_separation(fresh) == 0.0 {
            return None;
        }
        let cost = distance_matrix(prev, fresh);
        let assign = min_cost_assignment(&cost);
        for (k, row) in cost.iter().enumerate() {
            let assigned = row[assign[k]];
            let runner_up = row
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != assign[k])
                .map(|(_, &d)| d)
                .fold(f64::INFINITY, f64::min);
            if assigned > 0.0 && runner_up < self.opts.safety * assigned {
                return None;
            }
        }
        Some(assign.iter().map(|&j| fresh[j]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix_family::fixtures::*;
    use crate::spectra::eigenvalues;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sqrt_sheet(z: Complex64) -> Complex64 {
        (c(1.0, 0.0) + z * z).sqrt()
    }

    #[test]
    fn encircling_upper_branch_point_swaps_the_square_root_sheets() {
        // Oracle: sqrt(1+z²) flips sign once around z = i; 2z is single-valued.
        let family = ep2_plus_level();
        let lp = Loop::circle(c(0.0, 1.0), 0.3, 0.0, 1).unwrap();
        let b = lp.base_point();
        let labels = LabeledSpectrum::new(vec![sqrt_sheet(b), -sqrt_sheet(b), 2.0 * b]);
        let result = track(&family, lp.path(), &labels, &TrackOptions::default()).unwrap();
        assert_eq!(result.permutation, Permutation::transposition(3, 0, 1));
        assert!(result.min_gap > 0.0);
    }

    #[test]
    fn diagonal_pair_is_single_valued() {
        let family = diagonal_pair();
        let lp = Loop::circle(c(0.0, 0.0), 1.0, 0.0, 1).unwrap();
        let labels = LabeledSpectrum::new(vec![c(1.0, 0.0), c(-1.0, 0.0)]);
        let p = loop_permutation(&family, &lp, &labels, &TrackOptions::default()).unwrap();
        assert!(p.is_identity());
    }

    #[test]
    fn square_root_monodromy() {
        let family = root_companion(2);
        let labels = LabeledSpectrum::new(vec![c(1.0, 0.0), c(-1.0, 0.0)]);
        let once = Loop::circle(c(0.0, 0.0), 1.0, 0.0, 1).unwrap();
        let twice = Loop::circle(c(0.0, 0.0), 1.0, 0.0, 2).unwrap();
        let opts = TrackOptions::default();
        assert_eq!(loop_permutation(&family, &once, &labels, &opts).unwrap(), Permutation::transposition(2, 0, 1));
        assert!(loop_permutation(&family, &twice, &labels, &opts).unwrap().is_identity());
    }

    #[test]
    fn cube_root_monodromy() {
        let family = root_companion(3);
        let labels = LabeledSpectrum::new((0..3).map(|k| Complex64::from_polar(1.0, TAU * k as f64 / 3.0)).collect());
        let opts = TrackOptions::default();
        let once = Loop::circle(c(0.0, 0.0), 1.0, 0.0, 1).unwrap();
        let p = loop_permutation(&family, &once, &labels, &opts).unwrap();
        // e^{iθ/3} advances to the next cube root: k → k+1.
        assert_eq!(p, Permutation::new(vec![1, 2, 0]).unwrap());
        let thrice = Loop::circle(c(0.0, 0.0), 1.0, 0.0, 3).unwrap();
        assert!(loop_permutation(&family, &thrice, &labels, &opts).unwrap().is_identity());
    }

    #[test]
    fn reverse_loop_gives_inverse() {
        let family = root_companion(3);
        let labels = LabeledSpectrum::new((0..3).map(|k| Complex64::from_polar(1.0, TAU * k as f64 / 3.0)).collect());
        let lp = Loop::circle(c(0.0, 0.0), 1.0, 0.0, 1).unwrap();
        let opts = TrackOptions::default();
        let fwd = loop_permutation(&family, &lp, &labels, &opts).unwrap();
        let back = loop_permutation(&family, &lp.reversed(), &labels, &opts).unwrap();
        assert_eq!(back, fwd.inverse());
    }

    #[test]
    fn invariant_under_step_halving_and_sample_phase() {
        let family = ep2_plus_level();
        let center = c(0.0, 1.0);
        let lp = Loop::circle(center, 0.3, 0.0, 1).unwrap();
        let b = lp.base_point();
        let labels = LabeledSpectrum::new(eigenvalues(&family.evaluate(b)).unwrap().values);
        let coarse = TrackOptions::default().with_max_step(0.04);
        let fine = TrackOptions::default().with_max_step(0.02);
        let p1 = loop_permutation(&family, &lp, &labels, &coarse).unwrap();
        let p2 = loop_permutation(&family, &lp, &labels, &fine).unwrap();
        assert_eq!(p1, p2);
        // Same circle and base, split into two arcs at a different angle.
        let split = Path::arc(center, 0.3, 0.0, 2.1)
            .unwrap()
            .then(&Path::arc(center, 0.3, 2.1, TAU).unwrap())
            .unwrap();
        let p3 = loop_permutation(&family, &Loop::new(split).unwrap(), &labels, &coarse).unwrap();
        assert_eq!(p1, p3);
    }

    #[test]
    fn path_through_a_degeneracy_underflows() {
        // Eigenvalues of λ² - z collide at z = 0.
        let family = root_companion(2);
        let path = Path::line(c(-1.0, 0.0), c(1.0, 0.0));
        let labels = LabeledSpectrum::new(vec![c(0.0, 1.0), c(0.0, -1.0)]);
        let opts = TrackOptions { max_depth: 12, ..TrackOptions::default() }.with_max_step(0.1);
        assert!(matches!(track(&family, &path, &labels, &opts), Err(Error::StepUnderflow { .. })));
    }

    #[test]
    fn clearance_guard() {
        let family = root_companion(2);
        let lp = Loop::circle(c(0.0, 0.0), 0.05, 0.0, 1).unwrap();
        let b = lp.base_point();
        let labels = LabeledSpectrum::new(vec![b.sqrt(), -b.sqrt()]);
        let opts = TrackOptions { min_clearance: 0.1, ..TrackOptions::default() };
        assert!(matches!(track(&family, lp.path(), &labels, &opts), Err(Error::ClearanceViolated { .. })));
    }

    #[test]
    fn wrong_labels_rejected() {
        let family = root_companion(2);
        let lp = Loop::circle(c(0.0, 0.0), 1.0, 0.0, 1).unwrap();
        let labels = LabeledSpectrum::new(vec![c(1.0, 0.0), c(-1.5, 0.0)]);
        assert!(matches!(
            track(&family, lp.path(), &labels, &TrackOptions::default()),
            Err(Error::MultisetMismatch { .. })
        ));
    }

    #[test]
    fn constant_loop_is_identity() {
        let family = ep2_plus_level();
        let b = c(0.3, 1.0);
        let labels = LabeledSpectrum::new(eigenvalues(&family.evaluate(b)).unwrap().values);
        let p = loop_permutation(&family, &Loop::constant(b), &labels, &TrackOptions::default()).unwrap();
        assert!(p.is_identity());
    }

    #[test]
    fn csv_has_one_row_per_sample() {
        let family = diagonal_pair();
        let lp = Loop::circle(c(0.0, 0.0), 1.0, FRAC_PI_2, 1).unwrap();
        let labels = LabeledSpectrum::new(vec![c(0.0, 1.0), c(0.0, -1.0)]);
        let result = track(&family, lp.path(), &labels, &TrackOptions::default().with_max_step(PI / 8.0)).unwrap();
        let csv = result.to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "s_index,re_z,im_z,re_lambda_1,im_lambda_1,re_lambda_2,im_lambda_2");
        assert_eq!(lines.count(), result.samples.len());
    }
}
