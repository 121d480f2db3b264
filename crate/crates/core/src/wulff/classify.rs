use std::collections::BTreeMap;

use serde::Serialize;

use super::{WulffError, WulffShape};
use crate::geom::{ConvexPolytope, RealVector};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShapeClass {
    pub dim: usize,
    pub n_vertices: usize,
    pub n_edges: usize,
    pub n_facets: usize,
    pub centrally_symmetric: bool,
    pub zonotope: bool,
    /// Number of facets per vertex count (d = 3).
    pub facet_sizes: BTreeMap<usize, usize>,
    pub label: String,
}

fn symmetric(points: &[RealVector], tol: f64) -> bool {
    let n = points.len() as f64;
    let c = points.iter().fold(RealVector::zeros(points[0].len()), |a, p| a + p) / n;
    points.iter().all(|p| {
        let q = &c * 2.0 - p;
        points.iter().any(|r| (r - &q).norm() <= tol)
    })
}

/// Face counts, central symmetry of the body, and the zonotope test (every
/// 2-face centrally symmetric).
pub fn classify_shape(w: &WulffShape) -> Result<ShapeClass, WulffError> {
    let p: &ConvexPolytope = w.body.as_polytope().ok_or(WulffError::Degenerate)?;
    let tol = 1e-9 * p.scale();
    let verts = p.vertices();
    let sym = symmetric(verts, tol);
    let mut sizes = BTreeMap::new();
    let zonotope = if p.dim() == 2 {
        sym
    } else {
        let mut all = true;
        for f in p.facets() {
            *sizes.entry(f.vertices.len()).or_insert(0) += 1;
            let pts: Vec<RealVector> = f.vertices.iter().map(|&i| verts[i].clone()).collect();
            all &= symmetric(&pts, tol);
        }
        all
    };
    let hist: Vec<String> = sizes.iter().map(|(k, n)| format!("{n}x{k}")).collect();
    let label = if p.dim() == 2 {
        format!("{}-gon", p.n_vertices())
    } else {
        format!("V{}/E{}/F{} {}", p.n_vertices(), p.n_edges(), p.n_facets(), hist.join(","))
    };
    Ok(ShapeClass {
        dim: p.dim(),
        n_vertices: p.n_vertices(),
        n_edges: p.n_edges(),
        n_facets: p.n_facets(),
        centrally_symmetric: sym,
        zonotope,
        facet_sizes: sizes,
        label,
    })
}
