//! Paths and based loops in the parameter plane, built from line segments
//! and circular arcs.
//!
//! A position on a path is addressed by a segment parameter `u` in
//! `[0, segment_count]`: the integer part selects the segment and the
//! fractional part is the local parameter along it. Sampling, tracking and
//! bisection all work in this parameter so segment joints are hit exactly.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::bc_method::BranchCut;
use crate::error::{Error, Result};

/// Endpoint continuity tolerance, relative to `max(1, |z|)`.
pub const CONTINUITY_TOL: f64 = 1e-12;

/// Tolerance for cut geometry: tangency, collinearity and anchor contact.
pub const CUT_TOL: f64 = 1e-9;

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}

/// 2D cross product `a × b`.
fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Segment {
    Line { from: Complex64, to: Complex64 },
    /// Arc of `center + radius·e^{iθ}` for θ from `angle_from` to `angle_to`;
    /// counterclockwise when `angle_to > angle_from`.
    Arc { center: Complex64, radius: f64, angle_from: f64, angle_to: f64 },
}

impl Segment {
    pub fn start(&self) -> Complex64 {
        self.point_at(0.0)
    }

    pub fn end(&self) -> Complex64 {
        self.point_at(1.0)
    }

    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { from, to } => (to - from).norm(),
            Segment::Arc { radius, angle_from, angle_to, .. } => radius * (angle_to - angle_from).abs(),
        }
    }

    pub fn point_at(&self, t: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => {
                if t == 1.0 {
                    to
                } else {
                    from + (to - from) * t
                }
            }
            Segment::Arc { center, radius, angle_from, angle_to } => {
                let theta = if t == 1.0 { angle_to } else { angle_from + (angle_to - angle_from) * t };
                center + Complex64::from_polar(radius, theta)
            }
        }
    }

    /// Derivative of `point_at` with respect to the local parameter.
    pub fn tangent_at(&self, t: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => to - from,
            Segment::Arc { radius, angle_from, angle_to, .. } => {
                let sweep = angle_to - angle_from;
                let theta = angle_from + sweep * t;
                Complex64::new(0.0, sweep) * Complex64::from_polar(radius, theta)
            }
        }
    }

    pub fn reversed(&self) -> Segment {
        match *self {
            Segment::Line { from, to } => Segment::Line { from: to, to: from },
            Segment::Arc { center, radius, angle_from, angle_to } => Segment::Arc {
                center,
                radius,
                angle_from: angle_to,
                angle_to: angle_from,
            },
        }
    }

    pub fn distance_to(&self, p: Complex64) -> f64 {
        match *self {
            Segment::Line { from, to } => {
                let d = to - from;
                let len2 = d.norm_sqr();
                if len2 == 0.0 {
                    return (p - from).norm();
                }
                let t = ((p - from) * d.conj()).re / len2;
                (p - (from + d * t.clamp(0.0, 1.0))).norm()
            }
            Segment::Arc { center, radius, angle_from, angle_to } => {
                let endpoints = (p - self.start()).norm().min((p - self.end()).norm());
                let rel = p - center;
                if rel.norm() == 0.0 {
                    return radius;
                }
                let phi = rel.arg();
                let (lo, hi) = if angle_to >= angle_from {
                    (angle_from, angle_to)
                } else {
                    (angle_to, angle_from)
                };
                let shifted = lo + (phi - lo).rem_euclid(TAU);
                if shifted <= hi {
                    (rel.norm() - radius).abs()
                } else {
                    endpoints
                }
            }
        }
    }

    /// Transversal intersections with a cut as `(t, point, sign)`, `t` the
    /// local parameter.
    fn cut_intersections(&self, cut: &BranchCut) -> Result<Vec<(f64, Complex64, i8)>> {
        let a = cut.anchor();
        let d = cut.direction();
        let len = cut.length();
        let mut hits = Vec::new();
        let mut push = |t: f64, s: f64, seg: &Segment| -> Result<()> {
            if !(-CUT_TOL..=1.0 + CUT_TOL).contains(&t) || s > len {
                return Ok(());
            }
            let t = t.clamp(0.0, 1.0);
            let point = seg.point_at(t);
            if s.abs() <= CUT_TOL || (point - a).norm() <= CUT_TOL {
                return Err(Error::TouchesCutAnchor { at: point });
            }
            if s < 0.0 {
                return Ok(());
            }
            let tangent = seg.tangent_at(t);
            let c = cross(d, tangent);
            if c.abs() <= CUT_TOL * tangent.norm().max(f64::MIN_POSITIVE) {
                return Err(Error::TangentialCrossing { at: point });
            }
            hits.push((t, point, if c > 0.0 { 1 } else { -1 }));
            Ok(())
        };
        match *self {
            Segment::Line { from, to } => {
                let e = to - from;
                let denom = cross(d, e);
                let rel = from - a;
                if denom.abs() <= CUT_TOL * e.norm() {
                    // Parallel: only a problem when collinear and overlapping.
                    if cross(d, rel).abs() <= CUT_TOL * rel.norm().max(1.0) {
                        let s0 = (rel * d.conj()).re;
                        let s1 = ((to - a) * d.conj()).re;
                        if s0.max(s1) >= 0.0 && s0.min(s1) <= len {
                            return Err(Error::TangentialCrossing { at: from });
                        }
                    }
                    return Ok(hits);
                }
                // from + t e = a + s d
                let t = cross(rel, d) / denom;
                let s = cross(rel, e) / denom;
                push(t, s, self)?;
            }
            Segment::Arc { center, radius, angle_from, angle_to } => {
                // |a + s d - center|² = r²  →  s² + 2 b s + c = 0
                let rel = a - center;
                let b = (rel * d.conj()).re;
                let c = rel.norm_sqr() - radius * radius;
                let disc = b * b - c;
                if disc < -CUT_TOL * radius * radius {
                    return Ok(hits);
                }
                let sweep = angle_to - angle_from;
                if disc <= CUT_TOL * radius * radius {
                    // Grazing contact: tangential if it lies on the arc and cut.
                    let s = -b;
                    let p = a + d * s;
                    if s >= 0.0 && s <= len && self.distance_to(p) <= CUT_TOL * radius.max(1.0) {
                        return Err(Error::TangentialCrossing { at: p });
                    }
                    return Ok(hits);
                }
                let root = disc.sqrt();
                for s in [-b - root, -b + root] {
                    let p = a + d * s;
                    let phi = (p - center).arg();
                    // All t in [0,1] with angle_from + sweep t ≡ phi (mod 2π).
                    let turns = (sweep.abs() / TAU).ceil() as i64 + 1;
                    for k in -turns..=turns {
                        let t = (phi + TAU * k as f64 - angle_from) / sweep;
                        if (-CUT_TOL..=1.0 + CUT_TOL).contains(&t) {
                            push(t, s, self)?;
                        }
                    }
                }
                hits.sort_by(|x, y| x.0.total_cmp(&y.0));
                hits.dedup_by(|x, y| (x.0 - y.0).abs() <= CUT_TOL);
            }
        }
        Ok(hits)
    }
}

/// Piecewise path of lines and arcs. A path with no segments is the
/// constant path at `start`.
#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    start: Complex64,
    segments: Vec<Segment>,
}

impl Path {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let first = segments
            .first()
            .ok_or_else(|| Error::InvalidInput("a path needs at least one segment".into()))?;
        let start = first.start();
        for (i, pair) in segments.windows(2).enumerate() {
            if !close(pair[0].end(), pair[1].start(), CONTINUITY_TOL) {
                return Err(Error::InvalidInput(format!(
                    "segment {} ends at {} but segment {} starts at {}",
                    i,
                    pair[0].end(),
                    i + 1,
                    pair[1].start()
                )));
            }
        }
        for seg in &segments {
            if let Segment::Arc { radius, angle_from, angle_to, .. } = *seg {
                if !(radius > 0.0 && radius.is_finite() && angle_from.is_finite() && angle_to.is_finite()) {
                    return Err(Error::InvalidInput("arc needs a positive radius and finite angles".into()));
                }
            }
        }
        Ok(Path { start, segments })
    }

    pub fn constant(z: Complex64) -> Self {
        Path { start: z, segments: Vec::new() }
    }

    pub fn line(from: Complex64, to: Complex64) -> Self {
        Path { start: from, segments: vec![Segment::Line { from, to }] }
    }

    pub fn arc(center: Complex64, radius: f64, angle_from: f64, angle_to: f64) -> Result<Self> {
        Self::new(vec![Segment::Arc { center, radius, angle_from, angle_to }])
    }

    /// Full circle starting and ending at `center + radius·e^{i·start_angle}`,
    /// counterclockwise for `turns > 0`, clockwise for `turns < 0`.
    pub fn circle(center: Complex64, radius: f64, start_angle: f64, turns: i32) -> Result<Self> {
        Self::arc(center, radius, start_angle, start_angle + TAU * turns as f64)
    }

    pub fn start(&self) -> Complex64 {
        self.start
    }

    pub fn end(&self) -> Complex64 {
        self.segments.last().map_or(self.start, Segment::end)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    pub fn is_constant(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        close(self.start(), self.end(), CONTINUITY_TOL)
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    /// Point at segment parameter `u` in `[0, segment_count]`.
    pub fn point_at(&self, u: f64) -> Complex64 {
        if self.segments.is_empty() {
            return self.start;
        }
        let last = self.segments.len() - 1;
        let idx = (u.floor().max(0.0) as usize).min(last);
        self.segments[idx].point_at((u - idx as f64).clamp(0.0, 1.0))
    }

    /// Arc length between two segment parameters on the same segment.
    pub fn length_between(&self, u0: f64, u1: f64) -> f64 {
        if self.segments.is_empty() {
            return 0.0;
        }
        let idx = (u0.min(u1).floor().max(0.0) as usize).min(self.segments.len() - 1);
        (u1 - u0).abs() * self.segments[idx].length()
    }

    /// Traversal of `self` followed by `other`.
    pub fn then(&self, other: &Path) -> Result<Path> {
        if !close(self.end(), other.start(), CONTINUITY_TOL) {
            return Err(Error::BasePointMismatch { left: self.end(), right: other.start() });
        }
        let mut segments = self.segments.clone();
        segments.extend_from_slice(&other.segments);
        Ok(Path { start: self.start, segments })
    }

    pub fn reversed(&self) -> Path {
        Path {
            start: self.end(),
            segments: self.segments.iter().rev().map(Segment::reversed).collect(),
        }
    }

    /// Segment parameters of an ordered sampling with arc-length spacing at
    /// most `max_step`, including every segment endpoint.
    pub fn sample_params(&self, max_step: f64) -> Vec<f64> {
        if self.segments.is_empty() {
            return vec![0.0, 0.0];
        }
        let mut params = vec![0.0];
        for (i, seg) in self.segments.iter().enumerate() {
            let pieces = (seg.length() / max_step).ceil().max(1.0) as usize;
            for k in 1..=pieces {
                params.push(i as f64 + k as f64 / pieces as f64);
            }
        }
        params
    }

    pub fn sample(&self, max_step: f64) -> Result<Vec<Complex64>> {
        if !(max_step > 0.0) {
            return Err(Error::InvalidInput("max_step must be positive".into()));
        }
        Ok(self.sample_params(max_step).into_iter().map(|u| self.point_at(u)).collect())
    }

    pub fn distance_to(&self, p: Complex64) -> f64 {
        if self.segments.is_empty() {
            return (p - self.start).norm();
        }
        self.segments.iter().map(|s| s.distance_to(p)).fold(f64::INFINITY, f64::min)
    }

    /// Winding number about `p` by angle accumulation along a sampling fine
    /// enough that no chord subtends more than a small angle.
    pub fn winding_number(&self, p: Complex64) -> f64 {
        let dist = self.distance_to(p);
        if dist == 0.0 {
            return f64::NAN;
        }
        let points: Vec<Complex64> = self
            .sample_params((0.1 * dist).max(1e-9))
            .into_iter()
            .map(|u| self.point_at(u))
            .collect();
        points
            .windows(2)
            .map(|w| ((w[1] - p) / (w[0] - p)).arg())
            .sum::<f64>()
            / TAU
    }

    /// Transversal crossings with `cut`, ordered along the path.
    pub fn crossings(&self, cut: &BranchCut) -> Result<Vec<Crossing>> {
        crossings(self, cut)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossing {
    pub point: Complex64,
    /// `+1` when the path tangent points to the left of the cut direction
    /// (positive `direction × tangent`), `-1` otherwise.
    pub sign: i8,
    /// Segment parameter of the crossing.
    pub param: f64,
}

/// Ordered transversal intersections of `path` with `cut`.
///
/// Each segment owns its start but not its end, so a crossing exactly at a
/// joint is reported once; the final segment owns both ends.
pub fn crossings(path: &Path, cut: &BranchCut) -> Result<Vec<Crossing>> {
    let mut out = Vec::new();
    let last = path.segments.len().saturating_sub(1);
    for (i, seg) in path.segments.iter().enumerate() {
        for (t, point, sign) in seg.cut_intersections(cut)? {
            if t >= 1.0 && i != last {
                continue;
            }
            out.push(Crossing { point, sign, param: i as f64 + t });
        }
    }
    Ok(out)
}

/// A closed path together with its base point.
#[derive(Clone, Debug, PartialEq)]
pub struct Loop {
    path: Path,
}

impl Loop {
    pub fn new(path: Path) -> Result<Self> {
        if !path.is_closed() {
            return Err(Error::InvalidInput(format!(
                "loop starts at {} but ends at {}",
                path.start(),
                path.end()
            )));
        }
        Ok(Loop { path })
    }

    pub fn constant(base: Complex64) -> Self {
        Loop { path: Path::constant(base) }
    }

    /// Counterclockwise circle of `turns` turns based at
    /// `center + radius·e^{i·start_angle}`.
    pub fn circle(center: Complex64, radius: f64, start_angle: f64, turns: i32) -> Result<Self> {
        Self::new(Path::circle(center, radius, start_angle, turns)?)
    }

    pub fn base_point(&self) -> Complex64 {
        self.path.start()
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn into_path(self) -> Path {
        self.path
    }

    /// `self` traversed first, then `other`.
    pub fn concat(&self, other: &Loop) -> Result<Loop> {
        if !close(self.base_point(), other.base_point(), CONTINUITY_TOL) {
            return Err(Error::BasePointMismatch {
                left: self.base_point(),
                right: other.base_point(),
            });
        }
        Ok(Loop { path: self.path.then(&other.path)? })
    }

    pub fn reversed(&self) -> Loop {
        Loop { path: self.path.reversed() }
    }

    /// `self` repeated `times` times; `times == 0` gives the constant loop.
    pub fn repeated(&self, times: usize) -> Loop {
        let mut segments = Vec::new();
        for _ in 0..times {
            segments.extend_from_slice(self.path.segments());
        }
        Loop {
            path: Path { start: self.base_point(), segments },
        }
    }

    /// Conjugate `reverse(connecting) · self · connecting`, based at the end
    /// of `connecting`.
    pub fn conjugated_by(&self, connecting: &Path) -> Result<Loop> {
        let path = connecting.reversed().then(&self.path)?.then(connecting)?;
        Loop::new(path)
    }
}

/// Normalizes an angle into `(-π, π]`.
pub fn principal_angle(theta: f64) -> f64 {
    let t = (theta + PI).rem_euclid(TAU) - PI;
    if t == -PI {
        PI
    } else {
        t
    }
}
