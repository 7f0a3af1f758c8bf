use std::collections::VecDeque;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use super::{Letter, Permutation, Word};
use crate::bc_method::{sort_values, TotalOrder};
use crate::error::{Error, Result};
use crate::matrix_family::PolyMatrixFamily;
use crate::path_geometry::{Loop, Path, Segment};
use crate::spectra::eigenvalues;
use crate::tracking::{match_labels, track, LabeledSpectrum, TrackOptions};

/// Keyhole generators of the loops based at `base_point` in the plane with
/// `punctures` removed, with the permutation each one induces.
#[derive(Clone, Debug, Serialize)]
pub struct FundamentalLoopSystem {
    pub base_point: Complex64,
    pub punctures: Vec<Complex64>,
    #[serde(skip)]
    pub generators: Vec<Loop>,
    pub generator_perms: Vec<Permutation>,
    pub base_labels: LabeledSpectrum,
}

#[derive(Clone, Debug, Default)]
pub struct FlOptions {
    /// Keyhole circle radius; defaults to 0.3 times the smallest distance
    /// among punctures and base point.
    pub clearance: Option<f64>,
    /// Labels at the base point; defaults to the spectrum sorted by `order`.
    pub base_labels: Option<LabeledSpectrum>,
    pub order: TotalOrder,
    pub track: TrackOptions,
}

impl FundamentalLoopSystem {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Loop traversing the generators as spelled by `word`.
    pub fn word_loop(&self, word: &Word) -> Result<Loop> {
        let mut out = Loop::constant(self.base_point);
        for l in word.letters() {
            let g = self.generator(l.generator)?;
            out = out.concat(&if l.inverted { g.reversed() } else { g.clone() })?;
        }
        Ok(out)
    }

    fn generator(&self, k: usize) -> Result<&Loop> {
        self.generators.get(k).ok_or_else(|| {
            Error::InvalidInput(format!("generator g{} does not exist; the system has {}", k + 1, self.len()))
        })
    }
}

/// Smallest distance among the punctures and between base and punctures.
fn nearest_distance(base: Complex64, punctures: &[Complex64]) -> f64 {
    let mut best = punctures.iter().map(|&p| (p - base).norm()).fold(f64::INFINITY, f64::min);
    for (i, &p) in punctures.iter().enumerate() {
        for &q in &punctures[i + 1..] {
            best = best.min((p - q).norm());
        }
    }
    best
}

/// One keyhole per puncture, ordered by angle seen from `base` (ties by
/// distance), each tracked once.
pub fn build_generators(
    family: &PolyMatrixFamily,
    base: Complex64,
    branch_points: &[Complex64],
    opts: &FlOptions,
) -> Result<FundamentalLoopSystem> {
    let clearance = match opts.clearance {
        Some(c) if c > 0.0 && c.is_finite() => c,
        Some(c) => return Err(Error::InvalidInput(format!("clearance must be positive, got {c}"))),
        None => 0.3 * nearest_distance(base, branch_points).min(1.0 / 0.3),
    };
    for (i, &p) in branch_points.iter().enumerate() {
        if (p - base).norm() <= clearance {
            return Err(Error::PuncturesTooClose {
                clearance,
                detail: format!("base point {base} is within clearance of puncture {p}"),
            });
        }
        for &q in &branch_points[i + 1..] {
            if (p - q).norm() <= 2.0 * clearance {
                return Err(Error::PuncturesTooClose {
                    clearance,
                    detail: format!("punctures {p} and {q} are within twice the clearance"),
                });
            }
        }
    }

    let mut punctures = branch_points.to_vec();
    punctures.sort_by(|a, b| {
        let (da, db) = (a - base, b - base);
        da.arg().total_cmp(&db.arg()).then(da.norm().total_cmp(&db.norm()))
    });
    let generators = punctures
        .iter()
        .map(|&p| keyhole(base, p, &punctures, clearance))
        .collect::<Result<Vec<_>>>()?;

    let base_labels = match &opts.base_labels {
        Some(l) => l.clone(),
        None => {
            let mut values = eigenvalues(&family.evaluate(base))?.values;
            sort_values(&mut values, opts.order);
            LabeledSpectrum::new(values)
        }
    };
    from_loops(family, base, punctures, generators, base_labels, &opts.track)
}

/// Assembles a system from given generator loops after checking that loop
/// `k` winds once around puncture `k` and not around the others.
pub fn from_loops(
    family: &PolyMatrixFamily,
    base: Complex64,
    punctures: Vec<Complex64>,
    generators: Vec<Loop>,
    base_labels: LabeledSpectrum,
    opts: &TrackOptions,
) -> Result<FundamentalLoopSystem> {
    if punctures.len() != generators.len() {
        return Err(Error::SizeMismatch { left: punctures.len(), right: generators.len() });
    }
    for (k, g) in generators.iter().enumerate() {
        if (g.base_point() - base).norm() > 1e-12 * base.norm().max(1.0) {
            return Err(Error::BasePointMismatch { left: base, right: g.base_point() });
        }
        for (j, &p) in punctures.iter().enumerate() {
            let w = g.path().winding_number(p);
            let want = if j == k { 1.0 } else { 0.0 };
            if !((w - want).abs() < 1e-6) {
                return Err(Error::InvalidInput(format!(
                    "generator g{} winds {w:.3} times around {p}, expected {want}",
                    k + 1
                )));
            }
        }
    }
    let generator_perms = track_all(family, &generators, &base_labels, opts)?;
    Ok(FundamentalLoopSystem { base_point: base, punctures, generators, generator_perms, base_labels })
}

fn track_all(
    family: &PolyMatrixFamily,
    loops: &[Loop],
    labels: &LabeledSpectrum,
    opts: &TrackOptions,
) -> Result<Vec<Permutation>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = loops
            .iter()
            .map(|g| s.spawn(move || track(family, g.path(), labels, opts).map(|r| r.permutation)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("tracking thread panicked")).collect()
    })
}

/// Straight approach from `base` to the clearance circle of `p`, one CCW turn,
/// and the approach reversed. The approach detours by a short arc around any
/// other puncture it would pass within `clearance` of.
fn keyhole(base: Complex64, p: Complex64, punctures: &[Complex64], clearance: f64) -> Result<Loop> {
    let u = (p - base) / (p - base).norm();
    let end = p - u * clearance;
    let reach = (end - base).norm();

    let mut obstacles: Vec<(f64, f64, Complex64)> = Vec::new();
    for &q in punctures {
        if q == p {
            continue;
        }
        let rel = (q - base) / u;
        let (along, side) = (rel.re, rel.im);
        if side.abs() >= clearance || along <= 0.0 || along >= reach {
            let d = Segment::Line { from: base, to: end }.distance_to(q);
            if d >= clearance {
                continue;
            }
        }
        obstacles.push((along, side, q));
    }
    obstacles.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut segments = Vec::new();
    let mut cursor = base;
    let mut last_exit = 0.0;
    for &(along, side, q) in &obstacles {
        let half = (clearance * clearance - side * side).sqrt();
        if along - half < last_exit {
            return Err(Error::PuncturesTooClose {
                clearance,
                detail: format!("keyhole to {p} needs overlapping detours near {q}"),
            });
        }
        let entry = base + u * (along - half);
        let exit = base + u * (along + half);
        let a0 = (entry - q).arg();
        let a1 = (exit - q).arg();
        // Obstacle on the left of travel: pass it on the right, turning CCW.
        let sweep = if side > 0.0 { (a1 - a0).rem_euclid(TAU) } else { -(a0 - a1).rem_euclid(TAU) };
        let arc = Segment::Arc { center: q, radius: clearance, angle_from: a0, angle_to: a0 + sweep };
        segments.push(Segment::Line { from: cursor, to: arc.start() });
        segments.push(arc);
        cursor = arc.end();
        last_exit = along + half;
    }
    segments.push(Segment::Line { from: cursor, to: end });
    let approach = Path::new(segments)?;
    let a = (approach.end() - p).arg();
    let circle = Path::arc(p, clearance, a, a + TAU)?;
    Loop::new(approach.then(&circle)?.then(&approach.reversed())?)
}

/// Folds the generator permutations over `word` in path order.
pub fn word_permutation(word: &Word, sys: &FundamentalLoopSystem) -> Result<Permutation> {
    let n = sys.base_labels.len();
    let mut acc = Permutation::identity(n);
    for l in word.letters() {
        let g = sys.generator_perms.get(l.generator).ok_or_else(|| {
            Error::InvalidInput(format!("generator g{} does not exist; the system has {}", l.generator + 1, sys.len()))
        })?;
        acc = acc.compose(&if l.inverted { g.inverse() } else { g.clone() })?;
    }
    Ok(acc)
}

/// Moves the base point along `connecting` (from the current base `x0` to a
/// new base `x1`).
///
/// With `σ` the permutation carrying base labels at `x0` to `target_labels` at
/// `x1` along `connecting`, every generator permutation becomes `σ⁻¹·π·σ` in
/// path order. The conjugated loops are re-tracked and must agree.
/// `target_labels` defaults to the spectrum at `x1` in the re-then-im order.
pub fn conjugate_base_change(
    family: &PolyMatrixFamily,
    sys: &FundamentalLoopSystem,
    connecting: &Path,
    target_labels: Option<&LabeledSpectrum>,
    opts: &TrackOptions,
) -> Result<FundamentalLoopSystem> {
    if (connecting.start() - sys.base_point).norm() > 1e-12 * sys.base_point.norm().max(1.0) {
        return Err(Error::BasePointMismatch { left: sys.base_point, right: connecting.start() });
    }
    if connecting.is_constant() && target_labels.is_none() {
        return Ok(sys.clone());
    }
    let x1 = connecting.end();
    let carried = track(family, connecting, &sys.base_labels, opts)?;
    let target = match target_labels {
        Some(l) => l.clone(),
        None => {
            let mut values = eigenvalues(&family.evaluate(x1))?.values;
            sort_values(&mut values, TotalOrder::ReThenIm);
            LabeledSpectrum::new(values)
        }
    };
    let sigma = match_labels(carried.final_ordered(), &target)?;
    let predicted = sys
        .generator_perms
        .iter()
        .map(|pi| sigma.inverse().compose(pi)?.compose(&sigma))
        .collect::<Result<Vec<_>>>()?;
    let generators = sys
        .generators
        .iter()
        .map(|g| g.conjugated_by(connecting))
        .collect::<Result<Vec<_>>>()?;
    let tracked = track_all(family, &generators, &target, opts)?;
    for (k, (want, got)) in predicted.iter().zip(&tracked).enumerate() {
        if want != got {
            return Err(Error::ConjugationMismatch {
                generator: k + 1,
                predicted: want.to_string(),
                tracked: got.to_string(),
            });
        }
    }
    Ok(FundamentalLoopSystem {
        base_point: x1,
        punctures: sys.punctures.clone(),
        generators,
        generator_perms: predicted,
        base_labels: target,
    })
}

/// Largest number of words the kernel search will enumerate.
pub const KERNEL_SEARCH_LIMIT: usize = 5_000_000;

/// Every non-empty freely reduced word of length at most `max_len` whose
/// permutation is the identity, in breadth-first order. Cyclic rotations and
/// conjugates are reported separately.
pub fn accidental_equivalence_search(sys: &FundamentalLoopSystem, max_len: usize) -> Result<Vec<Word>> {
    if max_len == 0 {
        return Err(Error::InvalidInput("kernel search length must be at least 1".into()));
    }
    let k = sys.len();
    if k == 0 {
        return Ok(Vec::new());
    }
    let total: f64 = (1..=max_len).map(|l| 2.0 * k as f64 * (2.0 * k as f64 - 1.0).powi(l as i32 - 1)).sum();
    if total > KERNEL_SEARCH_LIMIT as f64 {
        return Err(Error::InvalidInput(format!(
            "kernel search would visit about {total:.0} words, above the limit of {KERNEL_SEARCH_LIMIT}"
        )));
    }
    let letters: Vec<(Letter, Permutation)> = (0..k)
        .flat_map(|g| {
            let p = &sys.generator_perms[g];
            [(Letter::new(g, false), p.clone()), (Letter::new(g, true), p.inverse())]
        })
        .collect();
    let mut found = Vec::new();
    let mut queue: VecDeque<(Word, Permutation)> = VecDeque::new();
    queue.push_back((Word::identity(), Permutation::identity(sys.base_labels.len())));
    while let Some((word, perm)) = queue.pop_front() {
        if word.len() == max_len {
            continue;
        }
        for (letter, lp) in &letters {
            if word.letters().last() == Some(&letter.inverse()) {
                continue;
            }
            let mut next = word.clone();
            next.push(*letter);
            let np = perm.compose(lp)?;
            if np.is_identity() {
                found.push(next.clone());
            }
            queue.push_back((next, np));
        }
    }
    Ok(found)
}
