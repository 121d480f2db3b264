//! Dual points x(J, k) inside a bounded region and their tiles.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use super::{MultigridError, MultigridSpec, SubsetFrame, INCIDENCE_TOL};
use crate::geom::RealVector;

#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    Ball { center: RealVector, radius: f64 },
    Box { lo: RealVector, hi: RealVector },
}

impl Region {
    pub fn ball(center: RealVector, radius: f64) -> Self {
        Region::Ball { center, radius }
    }

    /// Ball of the given radius around the origin.
    pub fn centered(dim: usize, radius: f64) -> Self {
        Region::Ball { center: RealVector::zeros(dim), radius }
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::Ball { center, .. } => center.len(),
            Region::Box { lo, .. } => lo.len(),
        }
    }

    pub fn contains(&self, x: &RealVector) -> bool {
        match self {
            Region::Ball { center, radius } => (x - center).norm_squared() <= radius * radius,
            Region::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi.iter())).all(|(c, (a, b))| *a <= *c && *c <= *b),
        }
    }

    /// Range of t_g over the region.
    fn t_range(&self, spec: &MultigridSpec, g: usize) -> (f64, f64) {
        let n = &spec.normals()[g];
        let len = n.norm();
        let (tm, spread) = match self {
            Region::Ball { center, radius } => (spec.t(g, center), radius / len),
            Region::Box { lo, hi } => {
                let half = (hi - lo) * 0.5;
                let s = n.iter().zip(half.iter()).map(|(a, h)| a.abs() * h).sum::<f64>() / (len * len);
                (spec.t(g, &((lo + hi) * 0.5)), s)
            }
        };
        (tm - spread, tm + spread)
    }
}

/// A vertex of the multigrid: the intersection of one hyperplane from each
/// family of J, with the full index k ∈ Z^G.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualPoint {
    pub j: Vec<usize>,
    /// k_g for every family; for g ∉ J this is ⌊t_g(x)⌋.
    pub k: Vec<i64>,
    pub x: RealVector,
}

impl DualPoint {
    pub fn k_j(&self) -> Vec<i64> {
        self.j.iter().map(|&g| self.k[g]).collect()
    }

    /// Identifies the point: (J, k_J).
    pub fn key(&self) -> (Vec<usize>, Vec<i64>) {
        (self.j.clone(), self.k_j())
    }
}

fn full_index(spec: &MultigridSpec, frame: &SubsetFrame, kj: &[i64], x: &RealVector) -> Result<Vec<i64>, MultigridError> {
    let mut k = vec![0i64; spec.len()];
    let mut pos = 0;
    for (g, slot) in k.iter_mut().enumerate() {
        if pos < frame.j.len() && frame.j[pos] == g {
            *slot = kj[pos];
            pos += 1;
            continue;
        }
        let t = spec.t(g, x);
        let f = t.floor();
        let frac = t - f;
        if !(INCIDENCE_TOL..=1.0 - INCIDENCE_TOL).contains(&frac) {
            return Err(MultigridError::GenericityViolation { j: frame.j.clone(), k: kj.to_vec(), g });
        }
        *slot = f as i64;
    }
    Ok(k)
}

impl MultigridSpec {
    /// The dual point x(J, k_J) with its full index.
    pub fn dual_point(&self, j: &[usize], kj: &[i64]) -> Result<DualPoint, MultigridError> {
        let frame = SubsetFrame::new(self, j)?;
        let x = frame.point(kj);
        let k = full_index(self, &frame, kj, &x)?;
        Ok(DualPoint { j: j.to_vec(), k, x })
    }
}

/// Visits the dual points of one subset in the region, k_J row-major.
fn scan_subset(
    spec: &MultigridSpec,
    j: &[usize],
    region: &Region,
    f: &mut dyn FnMut(DualPoint),
) -> Result<(), MultigridError> {
    let frame = SubsetFrame::new(spec, j)?;
    let d = j.len();
    let ranges: Vec<(i64, i64)> = j
        .iter()
        .map(|&g| {
            let (a, b) = region.t_range(spec, g);
            (a.floor() as i64, b.ceil() as i64)
        })
        .collect();
    let mut k: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        let x = frame.point(&k);
        if region.contains(&x) {
            let full = full_index(spec, &frame, &k, &x)?;
            f(DualPoint { j: j.to_vec(), k: full, x });
        }
        // odometer, last coordinate fastest
        let mut i = d;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if k[i] < ranges[i].1 {
                k[i] += 1;
                break;
            }
            k[i] = ranges[i].0;
        }
    }
}

/// Calls `f` on every dual point in the region; subsets in lexicographic
/// order, k_J row-major within a subset. Returns the number of points.
pub fn for_each_dual_point(spec: &MultigridSpec, region: &Region, mut f: impl FnMut(&DualPoint)) -> Result<usize, MultigridError> {
    let mut n = 0;
    for j in spec.subsets() {
        scan_subset(spec, &j, region, &mut |p| {
            n += 1;
            f(&p);
        })?;
    }
    Ok(n)
}

/// All dual points in the region, in the order of `for_each_dual_point`.
/// Subsets are enumerated in parallel.
pub fn dual_points_in_region(spec: &MultigridSpec, region: &Region) -> Result<Vec<DualPoint>, MultigridError> {
    if region.dim() != spec.dim() {
        return Err(MultigridError::InvalidSpec("region dimension differs from the spec".into()));
    }
    let parts: Vec<Result<Vec<DualPoint>, MultigridError>> = spec
        .subsets()
        .par_iter()
        .map(|j| {
            let mut out = Vec::new();
            scan_subset(spec, j, region, &mut |p| out.push(p)).map(|_| out)
        })
        .collect();
    let mut all = Vec::new();
    for p in parts {
        all.extend(p?);
    }
    Ok(all)
}

/// The parallelotope anchor + Σ_{g∈J} [0,1] g̃.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tile {
    pub j: Vec<usize>,
    pub k: Vec<i64>,
    pub anchor: RealVector,
    pub generators: Vec<RealVector>,
}

impl Tile {
    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_columns(&self.generators)
    }

    pub fn center(&self) -> RealVector {
        self.generators.iter().fold(self.anchor.clone(), |a, g| a + g * 0.5)
    }

    pub fn volume(&self) -> f64 {
        self.matrix().determinant().abs()
    }

    /// The 2^d corners; bit i of the index selects generator i.
    pub fn vertices(&self) -> Vec<RealVector> {
        (0..1usize << self.generators.len())
            .map(|m| {
                self.generators.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).fold(self.anchor.clone(), |a, (_, g)| a + g)
            })
            .collect()
    }

    pub fn diameter(&self) -> f64 {
        let vs = self.vertices();
        vs.iter().flat_map(|a| vs.iter().map(move |b| (a - b).norm())).fold(0.0, f64::max)
    }

    /// Coordinates y with x = anchor + Σ y_i g̃_i.
    pub fn local_coords(&self, x: &RealVector) -> RealVector {
        self.matrix().lu().solve(&(x - &self.anchor)).expect("tile generators are independent")
    }

    pub fn contains(&self, x: &RealVector, tol: f64) -> bool {
        self.local_coords(x).iter().all(|&y| (-tol..=1.0 + tol).contains(&y))
    }
}

/// Anchor Σ_g k_g g̃ + Σ_{g∉J} g̃: families not through x contribute ⌈t_g⌉.
pub fn tile_of(spec: &MultigridSpec, p: &DualPoint) -> Tile {
    let mut anchor = RealVector::zeros(spec.dim());
    for (g, e) in spec.edges().iter().enumerate() {
        let c = if p.j.contains(&g) { p.k[g] } else { p.k[g] + 1 };
        anchor += e * c as f64;
    }
    Tile { j: p.j.clone(), k: p.k.clone(), anchor, generators: p.j.iter().map(|&g| spec.edges()[g].clone()).collect() }
}
