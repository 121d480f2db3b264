//! Wulff shapes W_φ = {x : ⟨x, ν⟩ <= φ(ν) for all ν} of finitely supported
//! support functions, built as zonotopes, Minkowski differences of zonotopes,
//! or directly from halfspaces.

mod classify;
mod positivity;
mod scan;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::anisotropy::{EvalMode, SupportFunction};
use crate::geom::{
    cross3, halfspace_body, lex_cmp, minkowski_diff_segment, minkowski_sum, Body, GeomError, Hyperplane, RealVector,
};

pub use classify::{classify_shape, ShapeClass};
pub use positivity::{fan_directions, positivity_check, Positivity};
pub use scan::{grid, parameter_scan, scan_to_csv, ClassInterval, ScanFamily, ScanReport, ScanRow, OCTAHEDRON};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WulffError {
    #[error("weights have mixed signs; use signed_wulff")]
    MixedSigns,
    #[error("shape is empty or lower-dimensional")]
    Degenerate,
    #[error("Wulff shapes are computed for d = 2, 3 only, got {0}")]
    UnsupportedDimension(usize),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Zonotope,
    SignedDifference,
    Halfspace,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WulffShape {
    pub body: Body,
    pub provenance: Provenance,
    /// Empty, a point, or lower-dimensional.
    pub degenerate: bool,
}

impl WulffShape {
    fn new(body: Body, provenance: Provenance) -> Self {
        let degenerate = !body.is_full();
        WulffShape { body, provenance, degenerate }
    }

    pub fn support(&self, u: &RealVector) -> f64 {
        self.body.support(u)
    }
}

fn check_dim(phi: &SupportFunction) -> Result<(), WulffError> {
    if phi.dim == 2 || phi.dim == 3 {
        Ok(())
    } else {
        Err(WulffError::UnsupportedDimension(phi.dim))
    }
}

/// W of the single term w·⟨v,·⟩₊ (the segment [0, wv]) or w·|⟨v,·⟩| (the
/// segment [-wv, wv]), for w > 0.
fn atom_segment(v: &RealVector, w: f64, mode: EvalMode) -> Body {
    let d = v.len();
    let end = v * w;
    match mode {
        EvalMode::PositivePart => Body::from_points(d, &[RealVector::zeros(d), end]),
        EvalMode::AbsoluteValue => Body::from_points(d, &[-&end, end]),
    }
}

/// Sum of atom segments. Parallel atoms are merged first.
fn segment_sum(phi: &SupportFunction) -> Result<Body, WulffError> {
    let d = phi.dim;
    let mut merged: Vec<RealVector> = Vec::new();
    for (v, w) in &phi.atoms {
        if *w == 0.0 || v.norm() == 0.0 {
            continue;
        }
        let g = v * *w;
        let same = merged.iter_mut().find(|m| {
            let c = m.dot(&g);
            // same direction; absolute-value segments are symmetric so either sign merges
            (c > 0.0 || phi.mode == EvalMode::AbsoluteValue) && (c * c - m.norm_squared() * g.norm_squared()).abs() <= 1e-12 * m.norm_squared() * g.norm_squared()
        });
        match same {
            Some(m) => {
                if m.dot(&g) > 0.0 {
                    *m += &g;
                } else {
                    *m -= &g;
                }
            }
            None => merged.push(g),
        }
    }
    merged.sort_by(lex_cmp);
    let mut body = Body::point(RealVector::zeros(d));
    for g in &merged {
        body = minkowski_sum(&body, &atom_segment(g, 1.0, phi.mode))?;
    }
    Ok(body)
}

/// Zonotope Σ_v w(v)·[0, v] (positive part) or Σ_v w(v)·[-v, v] (absolute
/// value). Requires every weight to be nonnegative.
pub fn zonotope_of(phi: &SupportFunction) -> Result<WulffShape, WulffError> {
    check_dim(phi)?;
    if phi.atoms.iter().any(|(_, w)| *w < 0.0) {
        return Err(WulffError::MixedSigns);
    }
    Ok(WulffShape::new(segment_sum(phi)?, Provenance::Zonotope))
}

/// Unit facet normals of the zonotope of φ's atoms: ± the perpendiculars of
/// the generators (d = 2) or of generator pairs (d = 3).
fn zonotope_normals(phi: &SupportFunction) -> Vec<RealVector> {
    let gens: Vec<&RealVector> = phi.atoms.iter().filter(|(v, w)| *w != 0.0 && v.norm() > 0.0).map(|(v, _)| v).collect();
    let mut out: Vec<RealVector> = Vec::new();
    let mut push = |n: RealVector| {
        let n = n.normalize();
        for m in [n.clone(), -n] {
            if out.iter().all(|u| (u - &m).norm() > 1e-12) {
                out.push(m);
            }
        }
    };
    if phi.dim == 2 {
        for g in &gens {
            push(RealVector::from_vec(vec![-g[1], g[0]]));
        }
    } else {
        for (i, a) in gens.iter().enumerate() {
            for b in &gens[i + 1..] {
                let c = cross3(a, b);
                if c.norm() > 1e-12 * a.norm() * b.norm() {
                    push(c);
                }
            }
        }
    }
    out.sort_by(lex_cmp);
    out
}

/// W_{φ₊ - φ₋} = W_{φ₊} − W_{φ₋} (Minkowski difference).
///
/// Every facet normal of a difference A − B is a facet normal of A, and
/// A − B = ∩_n {⟨x, n⟩ <= h_A(n) − h_B(n)} over those normals. With A the
/// zonotope of φ₊ the offsets are φ(n) itself, so the shape is a single
/// halfspace intersection. A flat A is handled by subtracting segments.
pub fn signed_wulff(phi: &SupportFunction) -> Result<WulffShape, WulffError> {
    check_dim(phi)?;
    let (pos, neg) = phi.split_signs();
    let zono = segment_sum(&pos)?;
    if neg.atoms.iter().all(|(v, w)| *w == 0.0 || v.norm() == 0.0) {
        return Ok(WulffShape::new(zono, Provenance::SignedDifference));
    }
    if zono.is_full() {
        let hs: Vec<Hyperplane> = zonotope_normals(&pos).into_iter().map(|n| Hyperplane { offset: phi.eval(&n), normal: n }).collect();
        let radius: f64 = pos.atoms.iter().map(|(v, w)| w.abs() * v.norm()).sum();
        return Ok(WulffShape::new(halfspace_body(&hs, 2.0 * radius + 1.0)?, Provenance::SignedDifference));
    }
    let mut body = zono;
    for (v, w) in &neg.atoms {
        if body.is_empty() {
            break;
        }
        let g = v * *w;
        body = match phi.mode {
            EvalMode::AbsoluteValue => minkowski_diff_segment(&body, &g)?,
            // [0, g] = g/2 + [-g/2, g/2]
            EvalMode::PositivePart => minkowski_diff_segment(&body, &(&g * 0.5))?.translated(&(&g * -0.5)),
        };
    }
    Ok(WulffShape::new(body, Provenance::SignedDifference))
}

/// {x : ⟨x, n⟩ <= φ(n) for n in `directions`}. Equals W_φ when the directions
/// contain every facet normal of W_φ.
pub fn halfspace_wulff(phi: &SupportFunction, directions: &[RealVector]) -> Result<WulffShape, WulffError> {
    check_dim(phi)?;
    let hs: Vec<Hyperplane> = directions
        .iter()
        .filter(|n| n.norm() > 0.0)
        .map(|n| {
            let u = n.normalize();
            Hyperplane { offset: phi.eval(&u), normal: u }
        })
        .collect();
    let radius: f64 = phi.atoms.iter().map(|(v, w)| w.abs() * v.norm()).sum();
    match halfspace_body(&hs, 2.0 * radius + 1.0) {
        Ok(body) => Ok(WulffShape::new(body, Provenance::Halfspace)),
        Err(GeomError::Unbounded) => Err(WulffError::Degenerate),
        Err(e) => Err(e.into()),
    }
}

/// Halfspace construction over the fan directions of φ, which contain every
/// facet normal of W_φ.
pub fn wulff_from_fan(phi: &SupportFunction) -> Result<WulffShape, WulffError> {
    halfspace_wulff(phi, &fan_directions(phi))
}

/// Halfspace construction over the facet normals of both sign zonotopes.
pub fn wulff_from_zonotope_normals(phi: &SupportFunction) -> Result<WulffShape, WulffError> {
    let (pos, neg) = phi.split_signs();
    let mut dirs = Vec::new();
    for part in [&pos, &neg] {
        match segment_sum(part)? {
            Body::Full(p) => dirs.extend(p.facets().iter().map(|f| f.normal.clone())),
            // a flat zonotope has the fan's normals within its span
            _ => dirs.extend(fan_directions(part)),
        }
    }
    halfspace_wulff(phi, &dirs)
}

/// Unit normal of the plane spanned by a and b, if they are independent.
pub(crate) fn plane_normal(a: &RealVector, b: &RealVector) -> Option<RealVector> {
    let n = cross3(a, b);
    (n.norm() > 1e-12 * a.norm() * b.norm()).then(|| n.normalize())
}

#[cfg(test)]
mod tests;
