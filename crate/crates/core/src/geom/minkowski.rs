use super::body::Body;
use super::halfspace::halfspace_body;
use super::hull::plane_basis;
use super::{lex_cmp, rvec, GeomError, Hyperplane, RealVector, GEOM_EPS};

/// Minkowski sum as the hull of pairwise vertex sums.
pub fn minkowski_sum(p: &Body, q: &Body) -> Result<Body, GeomError> {
    if p.dim() != q.dim() {
        return Err(GeomError::DimensionMismatch(p.dim(), q.dim()));
    }
    if p.is_empty() || q.is_empty() {
        return Ok(Body::Empty { dim: p.dim() });
    }
    let qv = q.vertices();
    let sums: Vec<RealVector> = p.vertices().iter().flat_map(|a| qv.iter().map(move |b| a + b)).collect();
    Ok(Body::from_points(p.dim(), &sums))
}

/// P - [-v, v] = (P + v) ∩ (P - v). Empty results come back as `Body::Empty`.
pub fn minkowski_diff_segment(p: &Body, v: &RealVector) -> Result<Body, GeomError> {
    if p.dim() != v.len() {
        return Err(GeomError::DimensionMismatch(p.dim(), v.len()));
    }
    let scale = p.vertices().iter().flat_map(|x| x.iter()).fold(1.0f64, |m, c| m.max(c.abs()));
    let tol = GEOM_EPS * scale;
    if v.norm() <= tol {
        return Ok(p.clone());
    }
    match p {
        Body::Empty { dim } => Ok(Body::Empty { dim: *dim }),
        Body::Full(poly) => {
            // only the normals of P occur in an intersection of translates of P
            let hs: Vec<Hyperplane> = poly
                .facets()
                .iter()
                .map(|f| Hyperplane { normal: f.normal.clone(), offset: f.offset - f.normal.dot(v).abs() })
                .collect();
            halfspace_body(&hs, 4.0 * scale + 1.0)
        }
        Body::Degenerate { dim, affine_dim: 0, .. } => Ok(Body::Empty { dim: *dim }),
        Body::Degenerate { dim, affine_dim: 1, points } => {
            let axis = &points[1] - &points[0];
            let len = axis.norm();
            let u = &axis / len;
            if (v - &u * v.dot(&u)).norm() > tol {
                return Ok(Body::Empty { dim: *dim });
            }
            let shrink = v.dot(&u).abs();
            if 2.0 * shrink > len + tol {
                return Ok(Body::Empty { dim: *dim });
            }
            let a = &points[0] + &u * shrink;
            let b = &points[1] - &u * shrink;
            Ok(Body::from_points(*dim, &[a, b]))
        }
        Body::Degenerate { dim, points, .. } => {
            // planar polygon in R^3: work in plane coordinates
            let n = super::cross3(&(&points[1] - &points[0]), &(&points[2] - &points[0])).normalize();
            if v.dot(&n).abs() > tol {
                return Ok(Body::Empty { dim: *dim });
            }
            let (a, b) = plane_basis(&n);
            let origin = &points[0];
            let to2 = |x: &RealVector| rvec(&[a.dot(&(x - origin)), b.dot(&(x - origin))]);
            let local: Vec<RealVector> = points.iter().map(to2).collect();
            let flat = Body::from_points(2, &local);
            let v2 = rvec(&[a.dot(v), b.dot(v)]);
            let diff = minkowski_diff_segment(&flat, &v2)?;
            let lifted: Vec<RealVector> =
                diff.vertices().iter().map(|q| origin + &a * q[0] + &b * q[1]).collect();
            let mut lifted = lifted;
            lifted.sort_by(lex_cmp);
            Ok(Body::from_points(*dim, &lifted))
        }
    }
}
