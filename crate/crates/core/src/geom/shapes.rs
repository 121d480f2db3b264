//! Standard test bodies.

use std::f64::consts::PI;

use super::{convex_hull, rvec, ConvexPolytope, RealVector};

/// [0,1]^d for d = 2, 3.
pub fn unit_cube(d: usize) -> ConvexPolytope {
    let pts: Vec<RealVector> = (0..1usize << d).map(|m| RealVector::from_fn(d, |i, _| (m >> i & 1) as f64)).collect();
    convex_hull(&pts).expect("cube is full-dimensional")
}

/// [-1/2, 1/2]^d for d = 2, 3.
pub fn centered_cube(d: usize) -> ConvexPolytope {
    unit_cube(d).translated(&RealVector::from_element(d, -0.5))
}

/// Regular m-gon of the given area centered at the origin, one vertex on the
/// positive x-axis.
pub fn regular_polygon(m: usize, area: f64) -> ConvexPolytope {
    let r = (2.0 * area / (m as f64 * (2.0 * PI / m as f64).sin())).sqrt();
    let pts: Vec<RealVector> = (0..m)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / m as f64;
            rvec(&[r * t.cos(), r * t.sin()])
        })
        .collect();
    convex_hull(&pts).expect("polygon is full-dimensional")
}
