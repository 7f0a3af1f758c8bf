//! JSON wire formats for scenarios, loops and cuts.
//!
//! Complex numbers are `[re, im]`. A polynomial in `z` is an array of
//! coefficients in ascending order, each a number or `[re, im]`; a bare
//! number is a constant polynomial.

use std::collections::HashSet;
use std::fmt;
use std::marker::PhantomData;

use num_complex::Complex64;
use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use crate::bc_method::{BranchCut, TotalOrder};
use crate::error::{Error, Result};
use crate::matrix_family::{PolyMatrixFamily, Polynomial};
use crate::path_geometry::{Loop, Path, Segment};
use crate::spectra::{Disk, RootOptions};
use crate::tracking::TrackOptions;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffWire {
    Real(f64),
    Complex([f64; 2]),
}

impl From<CoeffWire> for Complex64 {
    fn from(c: CoeffWire) -> Self {
        match c {
            CoeffWire::Real(re) => Complex64::new(re, 0.0),
            CoeffWire::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolyWire {
    Constant(f64),
    Coeffs(Vec<CoeffWire>),
}

impl From<&PolyWire> for Polynomial {
    fn from(p: &PolyWire) -> Self {
        match p {
            PolyWire::Constant(c) => Polynomial::from_real(&[*c]),
            PolyWire::Coeffs(cs) => Polynomial::new(cs.iter().map(|&c| c.into()).collect()),
        }
    }
}

impl From<&Polynomial> for PolyWire {
    fn from(p: &Polynomial) -> Self {
        PolyWire::Coeffs(
            p.coeffs()
                .iter()
                .map(|c| if c.im == 0.0 { CoeffWire::Real(c.re) } else { CoeffWire::Complex([c.re, c.im]) })
                .collect(),
        )
    }
}

/// Dense rows of polynomial entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyWire {
    pub rows: Vec<Vec<PolyWire>>,
}

impl FamilyWire {
    pub fn to_family(&self) -> Result<PolyMatrixFamily> {
        PolyMatrixFamily::new(self.rows.iter().map(|r| r.iter().map(Polynomial::from).collect()).collect())
    }

    pub fn from_family(family: &PolyMatrixFamily) -> Self {
        FamilyWire { rows: family.rows().iter().map(|r| r.iter().map(PolyWire::from).collect()).collect() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SegmentWire {
    Line { from: Complex64, to: Complex64 },
    /// Angles in radians; counterclockwise when `to_angle > from_angle`.
    Arc { center: Complex64, radius: f64, from_angle: f64, to_angle: f64 },
}

impl From<SegmentWire> for Segment {
    fn from(s: SegmentWire) -> Self {
        match s {
            SegmentWire::Line { from, to } => Segment::Line { from, to },
            SegmentWire::Arc { center, radius, from_angle, to_angle } => {
                Segment::Arc { center, radius, angle_from: from_angle, angle_to: to_angle }
            }
        }
    }
}

impl From<Segment> for SegmentWire {
    fn from(s: Segment) -> Self {
        match s {
            Segment::Line { from, to } => SegmentWire::Line { from, to },
            Segment::Arc { center, radius, angle_from, angle_to } => {
                SegmentWire::Arc { center, radius, from_angle: angle_from, to_angle: angle_to }
            }
        }
    }
}

fn one() -> i32 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LoopWire {
    /// `turns` full turns, counterclockwise when positive, based at
    /// `center + radius·e^{i·start_angle}`.
    Circle {
        center: Complex64,
        radius: f64,
        #[serde(default)]
        start_angle: f64,
        #[serde(default = "one")]
        turns: i32,
    },
    Path { segments: Vec<SegmentWire> },
    Constant { base: Complex64 },
}

impl LoopWire {
    pub fn to_loop(&self) -> Result<Loop> {
        match self {
            LoopWire::Circle { center, radius, start_angle, turns } => {
                if *turns == 0 {
                    return Ok(Loop::constant(center + Complex64::from_polar(*radius, *start_angle)));
                }
                Loop::circle(*center, *radius, *start_angle, *turns)
            }
            LoopWire::Path { segments } => Loop::new(Path::new(segments.iter().map(|&s| s.into()).collect())?),
            LoopWire::Constant { base } => Ok(Loop::constant(*base)),
        }
    }

    pub fn from_loop(lp: &Loop) -> Self {
        if lp.path().is_constant() {
            return LoopWire::Constant { base: lp.base_point() };
        }
        LoopWire::Path { segments: lp.path().segments().iter().map(|&s| s.into()).collect() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutWire {
    pub anchor: Complex64,
    pub direction: Complex64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
}

impl CutWire {
    pub fn to_cut(&self) -> Result<BranchCut> {
        BranchCut::new(self.anchor, self.direction, self.length)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    /// Number of samples along the real axis.
    pub nx: usize,
    /// Number of samples along the imaginary axis.
    pub ny: usize,
}

fn default_safety() -> f64 {
    2.0
}

fn default_max_depth() -> u32 {
    30
}

fn default_max_iter() -> usize {
    200
}

fn default_offset() -> f64 {
    0.05
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsWire {
    #[serde(default)]
    pub max_step: Option<f64>,
    #[serde(default = "default_safety")]
    pub safety: f64,
    #[serde(default = "default_max_depth")]
    pub max_depth: u32,
    #[serde(default)]
    pub min_clearance: f64,
    /// Seed for the root finder's initial guesses.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// Keyhole radius for fundamental loops.
    #[serde(default)]
    pub clearance: Option<f64>,
    /// Search region for degeneracies; defaults to a disk containing all.
    #[serde(default)]
    pub region: Option<Disk>,
    /// Explicit keyhole punctures; defaults to the located branch points.
    #[serde(default)]
    pub punctures: Option<Vec<Complex64>>,
    /// Labels at the base point; defaults to the sorted spectrum.
    #[serde(default)]
    pub base_labels: Option<Vec<Complex64>>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    /// Half-width of the transversal across a cut.
    #[serde(default = "default_offset")]
    pub offset: f64,
}

impl Default for OptionsWire {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all options have defaults")
    }
}

impl OptionsWire {
    pub fn track_options(&self) -> Result<TrackOptions> {
        if let Some(s) = self.max_step {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidInput(format!("max_step must be positive, got {s}")));
            }
        }
        if !(self.safety > 1.0 && self.safety.is_finite()) {
            return Err(Error::InvalidInput(format!("safety must exceed 1, got {}", self.safety)));
        }
        if !(self.offset > 0.0 && self.offset.is_finite()) {
            return Err(Error::InvalidInput(format!("offset must be positive, got {}", self.offset)));
        }
        Ok(TrackOptions {
            max_step: self.max_step,
            safety: self.safety,
            max_depth: self.max_depth,
            min_clearance: self.min_clearance,
            roots: RootOptions { max_iter: self.max_iter, seed: self.seed },
        })
    }
}

/// Entries in file order; a repeated name is an error.
#[derive(Clone, Debug, PartialEq)]
pub struct NamedMap<T>(pub Vec<(String, T)>);

impl<T> Default for NamedMap<T> {
    fn default() -> Self {
        NamedMap(Vec::new())
    }
}

impl<T> NamedMap<T> {
    pub fn get(&self, name: &str) -> Option<&T> {
        self.0.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn names(&self) -> Vec<&str> {
        self.0.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn values(&self) -> impl Iterator<Item = &T> {
        self.0.iter().map(|(_, v)| v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<T: Serialize> Serialize for NamedMap<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_map(self.0.iter().map(|(k, v)| (k, v)))
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for NamedMap<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V<T>(PhantomData<T>);
        impl<'de, T: Deserialize<'de>> Visitor<'de> for V<T> {
            type Value = NamedMap<T>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a map with unique names")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<Self::Value, A::Error> {
                let mut seen = HashSet::new();
                let mut out = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, T>()? {
                    if !seen.insert(k.clone()) {
                        return Err(serde::de::Error::custom(format!("duplicate name {k:?}")));
                    }
                    out.push((k, v));
                }
                Ok(NamedMap(out))
            }
        }
        d.deserialize_map(V(PhantomData))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioWire {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub family: FamilyWire,
    #[serde(default)]
    pub base_point: Option<Complex64>,
    #[serde(default)]
    pub order: TotalOrder,
    #[serde(default)]
    pub loops: NamedMap<LoopWire>,
    #[serde(default)]
    pub cuts: NamedMap<CutWire>,
    #[serde(default)]
    pub options: OptionsWire,
}

/// A validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub family: PolyMatrixFamily,
    pub base_point: Option<Complex64>,
    pub order: TotalOrder,
    pub loops: NamedMap<Loop>,
    pub cuts: NamedMap<BranchCut>,
    pub options: OptionsWire,
    pub track: TrackOptions,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_wire(serde_json::from_str(text)?)
    }

    pub fn from_wire(w: ScenarioWire) -> Result<Self> {
        let family = w.family.to_family()?;
        let loops = w
            .loops
            .0
            .iter()
            .map(|(n, l)| {
                l.to_loop()
                    .map(|lp| (n.clone(), lp))
                    .map_err(|e| Error::InvalidInput(format!("loop {n:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let cuts = w
            .cuts
            .0
            .iter()
            .map(|(n, c)| {
                c.to_cut()
                    .map(|cut| (n.clone(), cut))
                    .map_err(|e| Error::InvalidInput(format!("cut {n:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(labels) = &w.options.base_labels {
            if labels.len() != family.dim() {
                return Err(Error::InvalidInput(format!(
                    "base_labels has {} values for a {}x{} family",
                    labels.len(),
                    family.dim(),
                    family.dim()
                )));
            }
        }
        let track = w.options.track_options()?;
        Ok(Scenario {
            family,
            base_point: w.base_point,
            order: w.order,
            loops: NamedMap(loops),
            cuts: NamedMap(cuts),
            options: w.options,
            track,
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn cut_list(&self) -> Vec<BranchCut> {
        self.cuts.values().copied().collect()
    }
}
