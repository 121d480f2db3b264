use nalgebra::{DMatrix, DVector};

use super::body::Body;
use super::hull::{hull_2d, plane_basis};
use super::polytope::ConvexPolytope;
use super::{rvec, GeomError, Hyperplane, RealVector, GEOM_EPS};

/// Intersection of halfspaces {x : <n, x> <= offset}.
///
/// The clipping starts from a box whose half-width is 1e3 times the largest
/// offset; use [`halfspace_intersection_bounded`] to supply another one.
pub fn halfspace_intersection(hs: &[Hyperplane]) -> Result<ConvexPolytope, GeomError> {
    let scale = offset_scale(hs);
    halfspace_intersection_bounded(hs, 1e3 * scale)
}

pub fn halfspace_intersection_bounded(hs: &[Hyperplane], bound: f64) -> Result<ConvexPolytope, GeomError> {
    match halfspace_body(hs, bound)? {
        Body::Full(p) => Ok(p),
        Body::Empty { .. } => Err(GeomError::Empty),
        Body::Degenerate { .. } => Err(GeomError::DegenerateHull),
    }
}

fn offset_scale(hs: &[Hyperplane]) -> f64 {
    hs.iter().fold(1.0f64, |m, h| m.max(h.offset.abs()))
}

/// Halfspace intersection that reports empty and lower-dimensional results as
/// bodies instead of errors. Errors only when the result touches the box.
pub fn halfspace_body(hs: &[Hyperplane], bound: f64) -> Result<Body, GeomError> {
    let d = hs.first().map_or(0, |h| h.normal.len());
    if let Some(h) = hs.iter().find(|h| h.normal.len() != d) {
        return Err(GeomError::DimensionMismatch(d, h.normal.len()));
    }
    let tol = GEOM_EPS * offset_scale(hs);
    let raw = match d {
        2 => clip_polygon(hs, bound, tol),
        3 => clip_polyhedron(hs, bound, tol),
        _ => return Err(GeomError::UnsupportedDimension(d)),
    };
    if raw.is_empty() {
        return Ok(Body::Empty { dim: d });
    }
    let lim = bound * (1.0 - 1e-6);
    if raw.iter().any(|p| p.iter().any(|c| c.abs() >= lim)) {
        return Err(GeomError::Unbounded);
    }
    let refined: Vec<RealVector> = raw.iter().map(|p| refine_vertex(p, hs, tol)).collect();
    // a genuinely infeasible system can leave slivers of width ~tol behind
    if refined.iter().any(|p| hs.iter().any(|h| h.eval(p) > 1e3 * tol)) {
        return Ok(Body::Empty { dim: d });
    }
    Ok(Body::from_points(d, &refined))
}

/// Snap a clipped vertex onto its active constraints by least squares.
fn refine_vertex(p: &RealVector, hs: &[Hyperplane], tol: f64) -> RealVector {
    let d = p.len();
    let active: Vec<&Hyperplane> = hs.iter().filter(|h| h.eval(p).abs() <= 1e3 * tol).collect();
    if active.len() < d {
        return p.clone();
    }
    let a = DMatrix::from_fn(active.len(), d, |i, j| active[i].normal[j]);
    let b = DVector::from_iterator(active.len(), active.iter().map(|h| h.offset));
    let svd = a.svd(true, true);
    if svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min) < 1e-6 {
        return p.clone();
    }
    let violation = |x: &RealVector| hs.iter().map(|h| h.eval(x)).fold(0.0f64, f64::max);
    match svd.solve(&b, 1e-12) {
        // near-degenerate vertices with many active planes can snap outward
        Ok(x) if (&x - p).norm() <= 1e4 * tol && violation(&x) <= violation(p).max(tol) => x,
        _ => p.clone(),
    }
}

fn clip_ring_2d(ring: &[[f64; 2]], n: &[f64; 2], h: f64, tol: f64) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(ring.len() + 1);
    let m = ring.len();
    for i in 0..m {
        let a = ring[i];
        let b = ring[(i + 1) % m];
        let fa = n[0] * a[0] + n[1] * a[1] - h;
        let fb = n[0] * b[0] + n[1] * b[1] - h;
        if fa <= tol {
            out.push(a);
        }
        if (fa < -tol && fb > tol) || (fa > tol && fb < -tol) {
            let t = fa / (fa - fb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

fn clip_polygon(hs: &[Hyperplane], bound: f64, tol: f64) -> Vec<RealVector> {
    let mut ring = vec![[-bound, -bound], [bound, -bound], [bound, bound], [-bound, bound]];
    for h in hs {
        ring = clip_ring_2d(&ring, &[h.normal[0], h.normal[1]], h.offset, tol);
        if ring.is_empty() {
            break;
        }
    }
    ring.iter().map(|p| rvec(p)).collect()
}

fn clip_polyhedron(hs: &[Hyperplane], bound: f64, tol: f64) -> Vec<RealVector> {
    let b = bound;
    let c = |x: f64, y: f64, z: f64| rvec(&[x, y, z]);
    let mut faces: Vec<Vec<RealVector>> = vec![
        vec![c(-b, -b, -b), c(-b, b, -b), c(b, b, -b), c(b, -b, -b)],
        vec![c(-b, -b, b), c(b, -b, b), c(b, b, b), c(-b, b, b)],
        vec![c(-b, -b, -b), c(b, -b, -b), c(b, -b, b), c(-b, -b, b)],
        vec![c(-b, b, -b), c(-b, b, b), c(b, b, b), c(b, b, -b)],
        vec![c(-b, -b, -b), c(-b, -b, b), c(-b, b, b), c(-b, b, -b)],
        vec![c(b, -b, -b), c(b, b, -b), c(b, b, b), c(b, -b, b)],
    ];
    for h in hs {
        let mut next = Vec::with_capacity(faces.len() + 1);
        let mut cut: Vec<RealVector> = Vec::new();
        for face in &faces {
            let m = face.len();
            let mut out = Vec::with_capacity(m + 1);
            for i in 0..m {
                let a = &face[i];
                let bb = &face[(i + 1) % m];
                let fa = h.eval(a);
                let fb = h.eval(bb);
                if fa <= tol {
                    out.push(a.clone());
                    if fa >= -tol {
                        cut.push(a.clone());
                    }
                }
                if (fa < -tol && fb > tol) || (fa > tol && fb < -tol) {
                    let t = fa / (fa - fb);
                    let p = a + (bb - a) * t;
                    cut.push(p.clone());
                    out.push(p);
                }
            }
            if out.len() >= 3 {
                next.push(out);
            }
        }
        if cut.len() >= 3 {
            let (u, w) = plane_basis(&h.normal);
            let local: Vec<[f64; 2]> = cut.iter().map(|p| [u.dot(p), w.dot(p)]).collect();
            let ls = local.iter().fold(1.0f64, |m, q| m.max(q[0].abs()).max(q[1].abs()));
            let ring = hull_2d(&local, 1e-14 * ls * ls);
            if ring.len() >= 3 {
                next.push(ring.iter().map(|&i| cut[i].clone()).collect());
            }
        }
        faces = next;
        if faces.is_empty() {
            break;
        }
    }
    let mut pts: Vec<RealVector> = faces.into_iter().flatten().collect();
    pts.sort_by(super::lex_cmp);
    pts.dedup_by(|a, b| (&*a - &*b).norm() <= tol);
    pts
}
