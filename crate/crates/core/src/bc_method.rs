//! Replica of the branch-cut plus global-sorting procedure.
//!
//! Eigenvalues are labelled everywhere by their position in a fixed total
//! order on ℂ. Each user-declared cut carries a permutation read off by a
//! short physical track across it, and a loop's permutation is the product of
//! the permutations of the cuts it crosses. The sorting itself relabels
//! sheets wherever two eigenvalues tie in the order's primary key, and those
//! relabelings are invisible to the method unless they happen to sit on a
//! cut. [`detect_relabeling`] finds them; [`compare_methods`] sets the result
//! against tracking.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix_family::PolyMatrixFamily;
use crate::monodromy::Permutation;
use crate::path_geometry::{crossings, Loop, Path, CUT_TOL};
use crate::spectra::eigenvalues_with;
use crate::tracking::{match_labels, track, LabeledSpectrum, TrackOptions, Tracker};

/// Values closer than this cannot be told apart by the sorting.
pub const TIE_TOL: f64 = 1e-10;

/// Length used for cuts declared without one.
pub const DEFAULT_CUT_LENGTH: f64 = 1e6;

/// Relabel events are bracketed to this arc length.
pub const EVENT_TOL: f64 = 1e-6;

/// Lexicographic order on ℂ, largest first.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TotalOrder {
    /// Descending real part, ties by descending imaginary part.
    #[default]
    ReThenIm,
    /// Descending imaginary part, ties by descending real part.
    ImThenRe,
}

impl TotalOrder {
    /// `Less` when `a` sorts before `b`.
    pub fn compare(self, a: Complex64, b: Complex64) -> Ordering {
        let (ka, kb) = match self {
            TotalOrder::ReThenIm => ((a.re, a.im), (b.re, b.im)),
            TotalOrder::ImThenRe => ((a.im, a.re), (b.im, b.re)),
        };
        kb.0.total_cmp(&ka.0).then(kb.1.total_cmp(&ka.1))
    }
}

pub fn sort_values(values: &mut [Complex64], order: TotalOrder) {
    values.sort_by(|&a, &b| order.compare(a, b));
}

/// Labels by position in `order`.
pub fn sorted_labels(values: &[Complex64], order: TotalOrder) -> Result<LabeledSpectrum> {
    for (i, &a) in values.iter().enumerate() {
        for &b in &values[i + 1..] {
            if (a - b).norm() <= TIE_TOL {
                return Err(Error::UnresolvableTie { a, b });
            }
        }
    }
    let mut sorted = values.to_vec();
    sort_values(&mut sorted, order);
    Ok(LabeledSpectrum::new(sorted))
}

/// `ranks[k]` is the sorted position of `values[k]`.
pub fn ranks(values: &[Complex64], order: TotalOrder) -> Permutation {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| order.compare(values[a], values[b]));
    let mut r = vec![0; values.len()];
    for (pos, &k) in idx.iter().enumerate() {
        r[k] = pos;
    }
    Permutation::new(r).expect("ranks form a bijection")
}

/// Ray `anchor + t·direction` for `t` in `[0, length]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BranchCut {
    anchor: Complex64,
    direction: Complex64,
    length: f64,
}

impl BranchCut {
    /// `direction` is normalized; `length` defaults to [`DEFAULT_CUT_LENGTH`].
    pub fn new(anchor: Complex64, direction: Complex64, length: Option<f64>) -> Result<Self> {
        let norm = direction.norm();
        if !(norm > 0.0 && norm.is_finite()) || !anchor.is_finite() {
            return Err(Error::InvalidInput("cut needs a finite anchor and a nonzero direction".into()));
        }
        let length = length.unwrap_or(DEFAULT_CUT_LENGTH);
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidInput(format!("cut length must be positive and finite, got {length}")));
        }
        Ok(BranchCut { anchor, direction: direction / norm, length })
    }

    pub fn anchor(&self) -> Complex64 {
        self.anchor
    }

    pub fn direction(&self) -> Complex64 {
        self.direction
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// `i·direction`: the side a positive crossing moves toward.
    pub fn normal(&self) -> Complex64 {
        Complex64::i() * self.direction
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BcOptions {
    pub order: TotalOrder,
    /// Half-width of the transversal used to read off crossing permutations.
    pub offset: f64,
    pub track: TrackOptions,
}

impl Default for BcOptions {
    fn default() -> Self {
        BcOptions { order: TotalOrder::default(), offset: 0.05, track: TrackOptions::default() }
    }
}

/// Sorted labels at `crossing_point - h·normal` carried by a short track to
/// `crossing_point + h·normal` and re-read in the sorted labels there. The
/// half-width `h` starts at `opts.offset` and is halved until halving no
/// longer changes the answer.
pub fn bc_crossing_permutation(
    family: &PolyMatrixFamily,
    cut: &BranchCut,
    crossing_point: Complex64,
    opts: &BcOptions,
) -> Result<Permutation> {
    let rel = (crossing_point - cut.anchor) / cut.direction;
    let scale = crossing_point.norm().max(1.0);
    if rel.norm() <= CUT_TOL * scale {
        return Err(Error::TouchesCutAnchor { at: crossing_point });
    }
    if rel.im.abs() > CUT_TOL * scale || rel.re <= 0.0 || rel.re > cut.length {
        return Err(Error::NotOnCut { at: crossing_point });
    }
    if !(opts.offset > 0.0) {
        return Err(Error::InvalidInput("crossing offset must be positive".into()));
    }
    let mut h = opts.offset;
    let mut wide = transversal_permutation(family, cut, crossing_point, h, opts)?;
    while h > 1e-8 {
        let narrow = transversal_permutation(family, cut, crossing_point, h / 2.0, opts)?;
        if narrow == wide {
            return Ok(wide);
        }
        h /= 2.0;
        wide = narrow;
    }
    Err(Error::StepUnderflow { z: crossing_point })
}

fn transversal_permutation(
    family: &PolyMatrixFamily,
    cut: &BranchCut,
    at: Complex64,
    h: f64,
    opts: &BcOptions,
) -> Result<Permutation> {
    let from = at - cut.normal() * h;
    let to = at + cut.normal() * h;
    let before = sorted_labels(&eigenvalues_with(&family.evaluate(from), &opts.track.roots)?.values, opts.order)?;
    let after = sorted_labels(&eigenvalues_with(&family.evaluate(to), &opts.track.roots)?.values, opts.order)?;
    let track_opts = TrackOptions { max_step: Some(h / 8.0), ..opts.track };
    let carried = track(family, &Path::line(from, to), &before, &track_opts)?;
    match_labels(carried.final_ordered(), &after)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutCrossing {
    /// Index into the cut list.
    pub cut: usize,
    pub point: Complex64,
    pub sign: i8,
    /// Crossing permutation with the sign applied.
    pub permutation: Permutation,
}

/// Crossings of `lp` with all `cuts`, ordered along the loop, each with its
/// signed permutation.
pub fn bc_crossings(
    family: &PolyMatrixFamily,
    lp: &Loop,
    cuts: &[BranchCut],
    opts: &BcOptions,
) -> Result<Vec<CutCrossing>> {
    let mut all = Vec::new();
    for (k, cut) in cuts.iter().enumerate() {
        for c in crossings(lp.path(), cut)? {
            all.push((c.param, k, c));
        }
    }
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    all.into_iter()
        .map(|(_, k, c)| {
            let p = bc_crossing_permutation(family, &cuts[k], c.point, opts)?;
            let permutation = if c.sign < 0 { p.inverse() } else { p };
            Ok(CutCrossing { cut: k, point: c.point, sign: c.sign, permutation })
        })
        .collect()
}

/// Path-ordered product of the signed crossing permutations.
pub fn bc_loop_permutation(
    family: &PolyMatrixFamily,
    lp: &Loop,
    cuts: &[BranchCut],
    opts: &BcOptions,
) -> Result<Permutation> {
    bc_crossings(family, lp, cuts, opts)?
        .iter()
        .try_fold(Permutation::identity(family.dim()), |acc, c| acc.compose(&c.permutation))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelabelEvent {
    pub z: Complex64,
    /// Segment parameter along the path.
    pub param: f64,
    /// Sorted label before the event to sorted label after, for the same
    /// tracked sheet.
    pub permutation: Permutation,
}

/// Points along `path` where the sorted labelling of the tracked sheets
/// changes, each bracketed to [`EVENT_TOL`] in arc length.
pub fn detect_relabeling(family: &PolyMatrixFamily, path: &Path, opts: &BcOptions) -> Result<Vec<RelabelEvent>> {
    if path.is_constant() {
        return Ok(Vec::new());
    }
    let mut tracker = Tracker::new(family, path, &opts.track)?;
    let initial = sorted_labels(&tracker.spectrum_at(path.start(), None)?, opts.order)?;
    let mut cur = tracker.start_values(&initial)?;
    let mut events = Vec::new();
    let params = path.sample_params(tracker.max_step);
    for w in params.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let next = tracker.advance(w[0], &cur, w[1], 0, None)?;
        bracket(&mut tracker, path, opts.order, (w[0], &cur), (w[1], &next), &mut events)?;
        cur = next;
    }
    Ok(events)
}

fn bracket(
    tracker: &mut Tracker<'_>,
    path: &Path,
    order: TotalOrder,
    (ua, va): (f64, &[Complex64]),
    (ub, vb): (f64, &[Complex64]),
    events: &mut Vec<RelabelEvent>,
) -> Result<()> {
    let (ra, rb) = (ranks(va, order), ranks(vb, order));
    if ra == rb {
        return Ok(());
    }
    if path.length_between(ua, ub) <= EVENT_TOL {
        let param = 0.5 * (ua + ub);
        events.push(RelabelEvent { z: path.point_at(param), param, permutation: ra.inverse().compose(&rb)? });
        return Ok(());
    }
    let mid = 0.5 * (ua + ub);
    let vm = tracker.advance(ua, va, mid, 0, None)?;
    bracket(tracker, path, order, (ua, va), (mid, &vm), events)?;
    bracket(tracker, path, order, (mid, &vm), (ub, vb), events)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub base_point: Complex64,
    pub order: TotalOrder,
    /// Sorted labels at the base point, shared by both permutations.
    pub base_labels: LabeledSpectrum,
    /// Ground truth from tracking.
    pub tracking: Permutation,
    pub bc_method: Permutation,
    pub agree: bool,
    pub crossings: Vec<CutCrossing>,
    pub relabel_events: Vec<RelabelEvent>,
}

pub fn compare_methods(
    family: &PolyMatrixFamily,
    lp: &Loop,
    cuts: &[BranchCut],
    opts: &BcOptions,
) -> Result<ComparisonReport> {
    let base = lp.base_point();
    let base_labels = sorted_labels(&eigenvalues_with(&family.evaluate(base), &opts.track.roots)?.values, opts.order)?;
    let tracking = track(family, lp.path(), &base_labels, &opts.track)?.permutation;
    let crossings = bc_crossings(family, lp, cuts, opts)?;
    let bc_method = crossings
        .iter()
        .try_fold(Permutation::identity(family.dim()), |acc, c| acc.compose(&c.permutation))?;
    let relabel_events = detect_relabeling(family, lp.path(), opts)?;
    Ok(ComparisonReport {
        base_point: base,
        order: opts.order,
        base_labels,
        agree: tracking == bc_method,
        tracking,
        bc_method,
        crossings,
        relabel_events,
    })
}
