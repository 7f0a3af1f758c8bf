use num_complex::Complex64;
use serde::Serialize;

use crate::bc_method::{compare_methods, sort_values, BcOptions, ComparisonReport};
use crate::error::{Error, Result};
use crate::formats::{GridSpec, Scenario};
use crate::monodromy::{
    accidental_equivalence_search, build_generators, word_permutation, FlOptions, Permutation, Word,
};
use crate::path_geometry::{Loop, Path};
use crate::spectra::{
    degeneracy_census, discriminant_root_bound, eigenvalues_with, locate_degeneracies, DegeneracyKind,
    DegeneracyPoint, Disk,
};
use crate::tracking::{track, LabeledSpectrum, TrackOptions};

fn region(s: &Scenario) -> Result<Disk> {
    match s.options.region {
        Some(r) => Ok(r),
        None => Ok(Disk::new(Complex64::new(0.0, 0.0), discriminant_root_bound(&s.family)?)),
    }
}

fn bc_options(s: &Scenario) -> BcOptions {
    BcOptions { order: s.order, offset: s.options.offset, track: s.track }
}

fn labels_at(s: &Scenario, z: Complex64) -> Result<LabeledSpectrum> {
    if let Some(l) = &s.options.base_labels {
        return Ok(LabeledSpectrum::new(l.clone()));
    }
    let mut values = eigenvalues_with(&s.family.evaluate(z), &s.track.roots)?.values;
    sort_values(&mut values, s.order);
    Ok(LabeledSpectrum::new(values))
}

fn pick_loop<'a>(s: &'a Scenario, name: Option<&str>) -> Result<(String, &'a Loop)> {
    match name {
        Some(n) => s
            .loops
            .get(n)
            .map(|l| (n.to_string(), l))
            .ok_or_else(|| Error::InvalidInput(format!("no loop named {n:?}; scenario has {:?}", s.loops.names()))),
        None if s.loops.len() == 1 => Ok((s.loops.0[0].0.clone(), &s.loops.0[0].1)),
        None => Err(Error::InvalidInput(format!(
            "--loop is required; scenario has {:?}",
            s.loops.names()
        ))),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EpsReport {
    pub region: Disk,
    pub degeneracies: Vec<DegeneracyPoint>,
}

pub fn cmd_eps(s: &Scenario) -> Result<EpsReport> {
    let region = region(s)?;
    let degeneracies = degeneracy_census(&s.family, &region, &s.track)?;
    Ok(EpsReport { region, degeneracies })
}

#[derive(Clone, Debug, Serialize)]
pub struct TrackReport {
    #[serde(rename = "loop")]
    pub loop_name: String,
    pub base_point: Complex64,
    pub base_labels: LabeledSpectrum,
    pub permutation: Permutation,
    pub min_gap: f64,
    pub refinements: usize,
    pub samples: usize,
    #[serde(skip)]
    pub csv: String,
}

pub fn cmd_track(s: &Scenario, loop_name: Option<&str>) -> Result<TrackReport> {
    let (name, lp) = pick_loop(s, loop_name)?;
    let base_labels = labels_at(s, lp.base_point())?;
    let result = track(&s.family, lp.path(), &base_labels, &s.track)?;
    Ok(TrackReport {
        loop_name: name,
        base_point: lp.base_point(),
        base_labels,
        permutation: result.permutation.clone(),
        min_gap: result.min_gap,
        refinements: result.refinements,
        samples: result.samples.len(),
        csv: result.to_csv()?,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorReport {
    pub name: String,
    pub puncture: Complex64,
    pub permutation: Permutation,
}

#[derive(Clone, Debug, Serialize)]
pub struct WordReport {
    pub word: Word,
    pub permutation: Permutation,
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelReport {
    pub max_len: usize,
    pub words: Vec<Word>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlReport {
    pub base_point: Complex64,
    pub base_labels: LabeledSpectrum,
    pub generators: Vec<GeneratorReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<WordReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelReport>,
}

/// Keyhole system at the scenario base point around the explicit punctures,
/// or around the branch points found in the region.
pub fn cmd_fl(s: &Scenario, word: Option<&Word>, kernel: Option<usize>) -> Result<FlReport> {
    let base = s
        .base_point
        .ok_or_else(|| Error::InvalidInput("the fl command needs base_point in the scenario".into()))?;
    let punctures = match &s.options.punctures {
        Some(p) => p.clone(),
        None => degeneracy_census(&s.family, &region(s)?, &s.track)?
            .into_iter()
            .filter(|p| p.kind == DegeneracyKind::BranchPoint)
            .map(|p| p.location)
            .collect(),
    };
    let opts = FlOptions {
        clearance: s.options.clearance,
        base_labels: s.options.base_labels.clone().map(LabeledSpectrum::new),
        order: s.order,
        track: s.track,
    };
    let sys = build_generators(&s.family, base, &punctures, &opts)?;
    let generators = sys
        .punctures
        .iter()
        .zip(&sys.generator_perms)
        .enumerate()
        .map(|(k, (&puncture, p))| GeneratorReport { name: format!("g{}", k + 1), puncture, permutation: p.clone() })
        .collect();
    let word = word
        .map(|w| Ok::<_, Error>(WordReport { word: w.clone(), permutation: word_permutation(w, &sys)? }))
        .transpose()?;
    let kernel = kernel
        .map(|l| Ok::<_, Error>(KernelReport { max_len: l, words: accidental_equivalence_search(&sys, l)? }))
        .transpose()?;
    Ok(FlReport { base_point: base, base_labels: sys.base_labels.clone(), generators, word, kernel })
}

pub fn cmd_compare(s: &Scenario, loop_name: Option<&str>) -> Result<ComparisonReport> {
    let (_, lp) = pick_loop(s, loop_name)?;
    compare_methods(&s.family, lp, &s.cut_list(), &bc_options(s))
}

/// Eigenvalues on a rectangular grid. `None` marks a point whose cell holds a
/// degeneracy or where continuation failed.
#[derive(Clone, Debug)]
pub struct SheetGrid {
    pub spec: GridSpec,
    pub dim: usize,
    /// Row-major: imaginary part outer, real part inner.
    pub points: Vec<(Complex64, Option<Vec<Complex64>>)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SheetSummary {
    pub grid: GridSpec,
    pub sheets: usize,
    pub points: usize,
    pub masked: usize,
}

impl SheetGrid {
    pub fn summary(&self) -> SheetSummary {
        SheetSummary {
            grid: self.spec,
            sheets: self.dim,
            points: self.points.len(),
            masked: self.points.iter().filter(|p| p.1.is_none()).count(),
        }
    }

    /// Columns `re_z, im_z, re_lambda_1, im_lambda_1, …`; masked values are NaN.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["re_z".to_string(), "im_z".into()];
        for k in 1..=self.dim {
            header.push(format!("re_lambda_{k}"));
            header.push(format!("im_lambda_{k}"));
        }
        w.write_record(&header)?;
        for (z, values) in &self.points {
            let mut row = vec![z.re.to_string(), z.im.to_string()];
            match values {
                Some(v) => {
                    for x in v {
                        row.push(x.re.to_string());
                        row.push(x.im.to_string());
                    }
                }
                None => row.extend(std::iter::repeat_n("NaN".to_string(), 2 * self.dim)),
            }
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Per-column continuation upward from the bottom row, which is labelled by
/// the scenario order. After a masked point the column is reseeded the same
/// way.
pub fn cmd_sheets(s: &Scenario) -> Result<SheetGrid> {
    let spec = s
        .options
        .grid
        .ok_or_else(|| Error::InvalidInput("the sheets command needs options.grid".into()))?;
    if !(spec.re_min <= spec.re_max && spec.im_min <= spec.im_max)
        || ![spec.re_min, spec.re_max, spec.im_min, spec.im_max].iter().all(|v| v.is_finite())
    {
        return Err(Error::InvalidInput("grid bounds must be finite and ordered".into()));
    }
    let xs = axis(spec.re_min, spec.re_max, spec.nx);
    let ys = axis(spec.im_min, spec.im_max, spec.ny);
    let dim = s.family.dim();
    let mut columns: Vec<Vec<Option<Vec<Complex64>>>> = Vec::with_capacity(xs.len());
    if !xs.is_empty() && !ys.is_empty() {
        let dx = if xs.len() > 1 { xs[1] - xs[0] } else { 0.0 };
        let dy = if ys.len() > 1 { ys[1] - ys[0] } else { 0.0 };
        let center = Complex64::new(0.5 * (spec.re_min + spec.re_max), 0.5 * (spec.im_min + spec.im_max));
        let reach = 0.5 * Complex64::new(spec.re_max - spec.re_min + dx, spec.im_max - spec.im_min + dy).norm();
        let degeneracies = match locate_degeneracies(&s.family, &Disk::new(center, reach + 1e-9)) {
            Ok(d) => d,
            Err(Error::DiscriminantIdenticallyZero) => return Err(Error::DiscriminantIdenticallyZero),
            Err(e) => return Err(e),
        };
        let in_cell = |z: Complex64| {
            degeneracies
                .iter()
                .any(|d| (d.re - z.re).abs() <= 0.5 * dx + 1e-12 && (d.im - z.im).abs() <= 0.5 * dy + 1e-12)
        };
        let step = TrackOptions { max_step: Some(if dy > 0.0 { dy } else { 1.0 }), ..s.track };
        for &x in &xs {
            let mut column = Vec::with_capacity(ys.len());
            let mut prev: Option<(Complex64, Vec<Complex64>)> = None;
            for &y in &ys {
                let z = Complex64::new(x, y);
                let value = if in_cell(z) {
                    None
                } else {
                    match &prev {
                        Some((z0, v0)) => track(&s.family, &Path::line(*z0, z), &LabeledSpectrum::new(v0.clone()), &step)
                            .ok()
                            .map(|r| r.final_ordered().to_vec()),
                        None => eigenvalues_with(&s.family.evaluate(z), &s.track.roots).ok().map(|sp| {
                            let mut v = sp.values;
                            sort_values(&mut v, s.order);
                            v
                        }),
                    }
                };
                prev = value.clone().map(|v| (z, v));
                column.push(value);
            }
            columns.push(column);
        }
    }
    let mut points = Vec::with_capacity(xs.len() * ys.len());
    for (j, &y) in ys.iter().enumerate() {
        for (i, &x) in xs.iter().enumerate() {
            points.push((Complex64::new(x, y), columns[i][j].clone()));
        }
    }
    Ok(SheetGrid { spec, dim, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(extra: &str) -> Scenario {
        Scenario::from_json(&format!(
            r#"{{
                "family": {{"rows": [[1, [0, 1], 0], [[0, 1], -1, 0], [0, 0, [0, 2]]]}},
                "base_point": [0, 0],
                "loops": {{"around_i": {{"kind": "circle", "center": [0, 1], "radius": 0.3}},
                           "still": {{"kind": "constant", "base": [0.3, 1]}}}},
                "cuts": {{"upper": {{"anchor": [0, 1], "direction": [0, 1]}},
                          "lower": {{"anchor": [0, -1], "direction": [0, -1]}}}}
                {extra}
            }}"#
        ))
        .unwrap()
    }

    #[test]
    fn eps_finds_two_branch_points_and_two_crossings() {
        let r = cmd_eps(&scenario("")).unwrap();
        assert_eq!(r.degeneracies.len(), 4);
        let branch = r.degeneracies.iter().filter(|d| d.kind == DegeneracyKind::BranchPoint).count();
        assert_eq!(branch, 2);
    }

    #[test]
    fn track_requires_a_known_loop() {
        let s = scenario("");
        assert!(matches!(cmd_track(&s, None), Err(Error::InvalidInput(_))));
        assert!(matches!(cmd_track(&s, Some("nope")), Err(Error::InvalidInput(_))));
        let r = cmd_track(&s, Some("still")).unwrap();
        assert!(r.permutation.is_identity());
    }

    #[test]
    fn fl_word_and_kernel() {
        let s = scenario("");
        let w: Word = "g1 g2^-1".parse().unwrap();
        let r = cmd_fl(&s, Some(&w), Some(2)).unwrap();
        assert_eq!(r.generators.len(), 2);
        assert!(r.word.unwrap().permutation.is_identity());
        assert!(r.kernel.unwrap().words.contains(&w));
    }

    #[test]
    fn empty_grid_is_header_only() {
        let s = scenario(r#", "options": {"grid": {"re_min": 0, "re_max": 1, "im_min": 0, "im_max": 1, "nx": 0, "ny": 5}}"#);
        let csv = cmd_sheets(&s).unwrap().to_csv().unwrap();
        assert_eq!(csv, "re_z,im_z,re_lambda_1,im_lambda_1,re_lambda_2,im_lambda_2,re_lambda_3,im_lambda_3\n");
    }

    #[test]
    fn degenerate_cells_are_masked() {
        let s = scenario(r#", "options": {"grid": {"re_min": -0.2, "re_max": 0.2, "im_min": 0.8, "im_max": 1.2, "nx": 5, "ny": 5}}"#);
        let grid = cmd_sheets(&s).unwrap();
        let masked: Vec<Complex64> = grid.points.iter().filter(|p| p.1.is_none()).map(|p| p.0).collect();
        assert_eq!(masked.len(), 1);
        assert!((masked[0] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!(grid.to_csv().unwrap().contains("NaN"));
    }
}
