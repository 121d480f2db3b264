//! One-parameter families of signed support functions and shape scans.

use std::fmt::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{classify_shape, positivity_check, signed_wulff, WulffError};
use crate::anisotropy::{EvalMode, SupportFunction};
use crate::geom::export::fmt_num;
use crate::geom::{rvec, RealVector};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanFamily {
    /// c·1_{FCC} − 1_{±e_i}; parameter c.
    FccMinusAxes(EvalMode),
    /// ±e_j at 2/3 and cyclic (±4,±2,±1) at 4/21 minus c on cyclic (0,±2,±4).
    Pyritohedron,
    /// c on the 30 icosahedron edge-midpoint directions minus 1 on the 12 vertex directions.
    Icosahedral,
}

fn cyclic(v: [f64; 3]) -> [[f64; 3]; 3] {
    [v, [v[2], v[0], v[1]], [v[1], v[2], v[0]]]
}

/// All sign choices on the nonzero coordinates of each cyclic permutation.
fn signed_cyclic(v: [f64; 3]) -> Vec<RealVector> {
    let mut out = Vec::new();
    for p in cyclic(v) {
        for m in 0..8u32 {
            let q: Vec<f64> = (0..3).map(|i| if m >> i & 1 == 1 { -p[i] } else { p[i] }).collect();
            let q = rvec(&q);
            if !out.iter().any(|u: &RealVector| (u - &q).norm() < 1e-12) {
                out.push(q);
            }
        }
    }
    out
}

fn icosahedron_vertices() -> Vec<RealVector> {
    let phi = 0.5 * (1.0 + 5f64.sqrt());
    signed_cyclic([0.0, 1.0, phi])
}

impl ScanFamily {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "fcc-minus-axes" | "fcc-minus-axes-abs" => Some(ScanFamily::FccMinusAxes(EvalMode::AbsoluteValue)),
            "fcc-minus-axes-pos" => Some(ScanFamily::FccMinusAxes(EvalMode::PositivePart)),
            "pyritohedron" => Some(ScanFamily::Pyritohedron),
            "icosahedral" => Some(ScanFamily::Icosahedral),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScanFamily::FccMinusAxes(EvalMode::AbsoluteValue) => "fcc-minus-axes",
            ScanFamily::FccMinusAxes(EvalMode::PositivePart) => "fcc-minus-axes-pos",
            ScanFamily::Pyritohedron => "pyritohedron",
            ScanFamily::Icosahedral => "icosahedral",
        }
    }

    pub fn support_function(&self, c: f64) -> SupportFunction {
        let mut atoms = Vec::new();
        let mode = match self {
            ScanFamily::FccMinusAxes(mode) => {
                atoms.extend(signed_cyclic([0.0, 1.0, 1.0]).into_iter().map(|v| (v, c)));
                atoms.extend(signed_cyclic([1.0, 0.0, 0.0]).into_iter().map(|v| (v, -1.0)));
                *mode
            }
            ScanFamily::Pyritohedron => {
                atoms.extend(signed_cyclic([1.0, 0.0, 0.0]).into_iter().map(|v| (v, 2.0 / 3.0)));
                atoms.extend(signed_cyclic([4.0, 2.0, 1.0]).into_iter().map(|v| (v, 4.0 / 21.0)));
                atoms.extend(signed_cyclic([0.0, 2.0, 4.0]).into_iter().map(|v| (v, -c)));
                EvalMode::AbsoluteValue
            }
            ScanFamily::Icosahedral => {
                let verts = icosahedron_vertices();
                let edge = verts.iter().flat_map(|a| verts.iter().map(move |b| (a - b).norm())).filter(|&l| l > 1e-9).fold(f64::INFINITY, f64::min);
                for (i, a) in verts.iter().enumerate() {
                    for b in &verts[i + 1..] {
                        if ((a - b).norm() - edge).abs() < 1e-9 {
                            atoms.push(((a + b).normalize(), c));
                        }
                    }
                }
                atoms.extend(verts.iter().map(|v| (v.normalize(), -1.0)));
                EvalMode::AbsoluteValue
            }
        };
        SupportFunction::new(3, atoms, mode)
    }

    /// Interval and shape the literature attaches to the family, for display.
    pub fn claimed(&self) -> Option<(&'static str, f64, f64)> {
        match self {
            ScanFamily::FccMinusAxes(_) => Some(("octahedron", 0.25, 0.5)),
            ScanFamily::Icosahedral => {
                let g = 0.5 * (1.0 + 5f64.sqrt());
                Some(("dodecahedron", (3.0 * g + 4.0 / 3.0) / ((2.0 + g).sqrt() * (3.0 * g + 1.0)), 5.0 / 6.0))
            }
            ScanFamily::Pyritohedron => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub c: f64,
    pub class: String,
    pub n_vertices: usize,
    pub n_facets: usize,
    pub zonotope: Option<bool>,
    pub positivity_min: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassInterval {
    pub class: String,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub family: String,
    pub rows: Vec<ScanRow>,
    /// Maximal runs of grid points with the same class.
    pub intervals: Vec<ClassInterval>,
    pub claimed: Option<(String, f64, f64)>,
}

impl ScanReport {
    pub fn intervals_of(&self, pred: impl Fn(&str) -> bool) -> Vec<&ClassInterval> {
        self.intervals.iter().filter(|i| pred(&i.class)).collect()
    }
}

/// Label used for the octahedron: six vertices, eight triangles.
pub const OCTAHEDRON: &str = "V6/E12/F8 8x3";

fn scan_row(family: ScanFamily, c: f64) -> Result<ScanRow, WulffError> {
    let phi = family.support_function(c);
    let pos = positivity_check(&phi);
    let w = signed_wulff(&phi)?;
    Ok(match classify_shape(&w) {
        Ok(cl) => ScanRow { c, class: cl.label, n_vertices: cl.n_vertices, n_facets: cl.n_facets, zonotope: Some(cl.zonotope), positivity_min: pos.min },
        Err(_) => {
            let class = if w.body.is_empty() { "empty" } else { "degenerate" };
            ScanRow { c, class: class.into(), n_vertices: w.body.vertices().len(), n_facets: 0, zonotope: None, positivity_min: pos.min }
        }
    })
}

/// Classify W at each grid value; the grid points are independent.
pub fn parameter_scan(family: ScanFamily, grid: &[f64]) -> Result<ScanReport, WulffError> {
    let rows: Vec<ScanRow> = grid.par_iter().map(|&c| scan_row(family, c)).collect::<Result<_, _>>()?;
    let mut intervals: Vec<ClassInterval> = Vec::new();
    for r in &rows {
        match intervals.last_mut() {
            Some(last) if last.class == r.class => last.hi = r.c,
            _ => intervals.push(ClassInterval { class: r.class.clone(), lo: r.c, hi: r.c }),
        }
    }
    Ok(ScanReport {
        family: family.name().into(),
        rows,
        intervals,
        claimed: family.claimed().map(|(s, a, b)| (s.to_string(), a, b)),
    })
}

/// Grid lo, lo+step, ..., up to hi (inclusive within half a step).
pub fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 0.5).floor() as usize;
    (0..=n).map(|i| lo + step * i as f64).collect()
}

pub fn scan_to_csv(report: &ScanReport) -> String {
    let mut s = String::from("c,n_vertices,n_facets,zonotope,positivity_min\n");
    for r in &report.rows {
        let z = match r.zonotope {
            Some(true) => "true",
            Some(false) => "false",
            None => "",
        };
        writeln!(s, "{},{},{},{},{}", fmt_num(r.c), r.n_vertices, r.n_facets, z, fmt_num(r.positivity_min)).unwrap();
    }
    s
}
