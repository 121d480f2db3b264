use nalgebra::DMatrix;

use super::hull::{hull_2d, plane_basis};
use super::polytope::{polygon_dist, seg_dist, ConvexPolytope};
use super::{convex_hull, lex_cmp, point_scale, RealVector, GEOM_EPS};

/// A compact convex set that may be empty or lower-dimensional.
///
/// Degenerate bodies keep only their extreme points: a single point, the two
/// ends of a segment, or the ring of a planar polygon in R^3.
#[derive(Clone, Debug, PartialEq)]
pub enum Body {
    Empty { dim: usize },
    Degenerate { dim: usize, affine_dim: usize, points: Vec<RealVector> },
    Full(ConvexPolytope),
}

impl Body {
    pub fn point(p: RealVector) -> Body {
        Body::Degenerate { dim: p.len(), affine_dim: 0, points: vec![p] }
    }

    pub fn dim(&self) -> usize {
        match self {
            Body::Empty { dim } | Body::Degenerate { dim, .. } => *dim,
            Body::Full(p) => p.dim(),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Body::Empty { .. })
    }

    pub fn is_full(&self) -> bool {
        matches!(self, Body::Full(_))
    }

    pub fn as_polytope(&self) -> Option<&ConvexPolytope> {
        match self {
            Body::Full(p) => Some(p),
            _ => None,
        }
    }

    /// Affine dimension; -1 for the empty set.
    pub fn affine_dim(&self) -> i32 {
        match self {
            Body::Empty { .. } => -1,
            Body::Degenerate { affine_dim, .. } => *affine_dim as i32,
            Body::Full(p) => p.dim() as i32,
        }
    }

    pub fn vertices(&self) -> Vec<RealVector> {
        match self {
            Body::Empty { .. } => Vec::new(),
            Body::Degenerate { points, .. } => points.clone(),
            Body::Full(p) => p.vertices().to_vec(),
        }
    }

    pub fn support(&self, u: &RealVector) -> f64 {
        self.vertices().iter().map(|v| v.dot(u)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn distance(&self, x: &RealVector) -> f64 {
        match self {
            Body::Empty { .. } => f64::INFINITY,
            Body::Full(p) => p.distance(x),
            Body::Degenerate { affine_dim: 0, points, .. } => (x - &points[0]).norm(),
            Body::Degenerate { affine_dim: 1, points, .. } => seg_dist(x, &points[0], &points[1]),
            Body::Degenerate { points, .. } => polygon_dist(x, points),
        }
    }

    /// Hausdorff distance. Both bodies are convex, so vertex distances suffice.
    pub fn hausdorff(&self, other: &Body) -> f64 {
        match (self.is_empty(), other.is_empty()) {
            (true, true) => return 0.0,
            (true, false) | (false, true) => return f64::INFINITY,
            _ => {}
        }
        let a = self.vertices().iter().map(|v| other.distance(v)).fold(0.0, f64::max);
        let b = other.vertices().iter().map(|v| self.distance(v)).fold(0.0, f64::max);
        a.max(b)
    }

    pub fn translated(&self, t: &RealVector) -> Body {
        match self {
            Body::Empty { dim } => Body::Empty { dim: *dim },
            Body::Degenerate { dim, affine_dim, points } => Body::Degenerate {
                dim: *dim,
                affine_dim: *affine_dim,
                points: points.iter().map(|p| p + t).collect(),
            },
            Body::Full(p) => Body::Full(p.translated(t)),
        }
    }

    pub fn scaled(&self, s: f64) -> Body {
        match self {
            Body::Full(p) => Body::Full(p.scaled(s)),
            _ => Body::from_points(self.dim(), &self.vertices().iter().map(|p| p * s).collect::<Vec<_>>()),
        }
    }

    /// Convex hull of arbitrary points, classified by affine dimension.
    pub fn from_points(dim: usize, points: &[RealVector]) -> Body {
        if points.is_empty() {
            return Body::Empty { dim };
        }
        let scale = point_scale(points);
        let tol = GEOM_EPS * scale;
        let base = &points[0];
        let diffs = DMatrix::from_fn(dim, points.len(), |i, j| points[j][i] - base[i]);
        let sv = diffs.clone().svd(true, false);
        let mut order: Vec<usize> = (0..sv.singular_values.len()).collect();
        order.sort_by(|&a, &b| sv.singular_values[b].total_cmp(&sv.singular_values[a]));
        let rank = order.iter().filter(|&&i| sv.singular_values[i] > tol * (points.len() as f64).sqrt()).count();
        let rank = if rank == dim {
            if let Ok(p) = convex_hull(points) {
                return Body::Full(p);
            }
            dim - 1
        } else {
            rank
        };
        match rank {
            0 => Body::point(points.iter().min_by(|a, b| lex_cmp(a, b)).unwrap().clone()),
            1 => {
                let u = sv.u.as_ref().unwrap().column(order[0]).into_owned();
                let lo = points.iter().min_by(|a, b| a.dot(&u).total_cmp(&b.dot(&u))).unwrap().clone();
                let hi = points.iter().max_by(|a, b| a.dot(&u).total_cmp(&b.dot(&u))).unwrap().clone();
                if (&hi - &lo).norm() <= tol {
                    return Body::point(lo);
                }
                let mut ends = vec![lo, hi];
                ends.sort_by(lex_cmp);
                Body::Degenerate { dim, affine_dim: 1, points: ends }
            }
            _ => {
                // a planar polygon inside R^3
                let u = sv.u.as_ref().unwrap();
                let n = super::cross3(&u.column(order[0]).into_owned(), &u.column(order[1]).into_owned()).normalize();
                let (a, b) = plane_basis(&n);
                let local: Vec<[f64; 2]> = points.iter().map(|p| [a.dot(p), b.dot(p)]).collect();
                let ring = hull_2d(&local, GEOM_EPS * scale * scale);
                let pts: Vec<RealVector> = ring.iter().map(|&i| points[i].clone()).collect();
                if pts.len() < 3 {
                    return Body::from_points(dim, &pts);
                }
                Body::Degenerate { dim, affine_dim: 2, points: pts }
            }
        }
    }
}

impl From<ConvexPolytope> for Body {
    fn from(p: ConvexPolytope) -> Self {
        Body::Full(p)
    }
}
