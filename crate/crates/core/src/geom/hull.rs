use std::collections::{BTreeSet, HashMap};

use super::polytope::{ConvexPolytope, Facet};
use super::{lex_cmp, point_scale, rvec, GeomError, RealVector, GEOM_EPS};

/// Convex hull of a point set in d = 2 or d = 3.
pub fn convex_hull(points: &[RealVector]) -> Result<ConvexPolytope, GeomError> {
    let d = points.first().map_or(0, |p| p.len());
    if points.iter().any(|p| p.len() != d) {
        return Err(GeomError::DimensionMismatch(d, points.iter().map(|p| p.len()).find(|&l| l != d).unwrap()));
    }
    match d {
        2 => hull_polygon(points),
        3 => hull_polyhedron(points),
        _ => Err(GeomError::UnsupportedDimension(d)),
    }
}

fn cross2(o: &[f64; 2], a: &[f64; 2], b: &[f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain. Returns indices in counter-clockwise order with
/// collinear points dropped.
pub(crate) fn hull_2d(pts: &[[f64; 2]], eps: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&a, &b| pts[a][0].total_cmp(&pts[b][0]).then(pts[a][1].total_cmp(&pts[b][1])));
    idx.dedup_by(|a, b| (pts[*a][0] - pts[*b][0]).abs() <= eps && (pts[*a][1] - pts[*b][1]).abs() <= eps);
    if idx.len() < 3 {
        return idx;
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2 && cross2(&pts[lower[lower.len() - 2]], &pts[lower[lower.len() - 1]], &pts[i]) <= eps {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2 && cross2(&pts[upper[upper.len() - 2]], &pts[upper[upper.len() - 1]], &pts[i]) <= eps {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn hull_polygon(points: &[RealVector]) -> Result<ConvexPolytope, GeomError> {
    let scale = point_scale(points);
    let pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
    // cross products are quadratic in the coordinates
    let ring = hull_2d(&pts, GEOM_EPS * scale * scale);
    if ring.len() < 3 {
        return Err(GeomError::DegenerateHull);
    }
    let verts: Vec<RealVector> = ring.iter().map(|&i| points[i].clone()).collect();
    Ok(ConvexPolytope::from_polygon_ring(verts))
}

/// Incremental 3D hull. Returns outward-oriented triangles over input indices.
fn hull_3d_triangles(pts: &[RealVector], eps: f64) -> Result<Vec<[usize; 3]>, GeomError> {
    let n = pts.len();
    if n < 4 {
        return Err(GeomError::DegenerateHull);
    }
    // initial simplex from extreme points
    let i0 = (0..n).min_by(|&a, &b| lex_cmp(&pts[a], &pts[b])).unwrap();
    let i1 = (0..n)
        .max_by(|&a, &b| (&pts[a] - &pts[i0]).norm().total_cmp(&(&pts[b] - &pts[i0]).norm()))
        .unwrap();
    let dir = &pts[i1] - &pts[i0];
    if dir.norm() <= eps {
        return Err(GeomError::DegenerateHull);
    }
    let line_dist = |p: &RealVector| super::cross3(&dir, &(p - &pts[i0])).norm() / dir.norm();
    let i2 = (0..n).max_by(|&a, &b| line_dist(&pts[a]).total_cmp(&line_dist(&pts[b]))).unwrap();
    if line_dist(&pts[i2]) <= eps {
        return Err(GeomError::DegenerateHull);
    }
    let nrm = super::cross3(&dir, &(&pts[i2] - &pts[i0]));
    let nrm = &nrm / nrm.norm();
    let plane_dist = |p: &RealVector| nrm.dot(&(p - &pts[i0]));
    let i3 = (0..n).max_by(|&a, &b| plane_dist(&pts[a]).abs().total_cmp(&plane_dist(&pts[b]).abs())).unwrap();
    if plane_dist(&pts[i3]).abs() <= eps {
        return Err(GeomError::DegenerateHull);
    }

    struct Face {
        v: [usize; 3],
        n: RealVector,
        off: f64,
        alive: bool,
    }
    let make = |v: [usize; 3]| -> Face {
        let a = &pts[v[0]];
        let nn = super::cross3(&(&pts[v[1]] - a), &(&pts[v[2]] - a));
        let len = nn.norm();
        let n = if len > 0.0 { nn / len } else { nn };
        let off = n.dot(a);
        Face { v, n, off, alive: true }
    };
    let centroid = (&pts[i0] + &pts[i1] + &pts[i2] + &pts[i3]) / 4.0;
    let mut faces: Vec<Face> = Vec::new();
    for tri in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
        let mut f = make(tri);
        if f.n.dot(&centroid) - f.off > 0.0 {
            f = make([tri[0], tri[2], tri[1]]);
        }
        faces.push(f);
    }
    let mut order: Vec<usize> = (0..n).filter(|&i| ![i0, i1, i2, i3].contains(&i)).collect();
    // farthest-first keeps intermediate hulls well shaped
    order.sort_by(|&a, &b| (&pts[b] - &centroid).norm().total_cmp(&(&pts[a] - &centroid).norm()));
    for p in order {
        let visible: Vec<usize> =
            (0..faces.len()).filter(|&f| faces[f].alive && faces[f].n.dot(&pts[p]) - faces[f].off > eps).collect();
        if visible.is_empty() {
            continue;
        }
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for &f in &visible {
            let v = faces[f].v;
            for e in 0..3 {
                *directed.entry((v[e], v[(e + 1) % 3])).or_insert(0) += 1;
            }
        }
        let mut horizon: Vec<(usize, usize)> =
            directed.keys().filter(|&&(a, b)| !directed.contains_key(&(b, a))).copied().collect();
        horizon.sort_unstable();
        for &f in &visible {
            faces[f].alive = false;
        }
        for (a, b) in horizon {
            faces.push(make([a, b, p]));
        }
    }
    Ok(faces.into_iter().filter(|f| f.alive).map(|f| f.v).collect())
}

fn hull_polyhedron(points: &[RealVector]) -> Result<ConvexPolytope, GeomError> {
    let scale = point_scale(points);
    let eps = GEOM_EPS * scale;
    let tris = hull_3d_triangles(points, eps)?;
    let cand: BTreeSet<usize> = tris.iter().flat_map(|t| t.iter().copied()).collect();
    let cand: Vec<usize> = cand.into_iter().collect();

    // group candidate points by supporting plane
    let mut planes: Vec<(RealVector, f64, Vec<usize>)> = Vec::new();
    for t in &tris {
        let a = &points[t[0]];
        let nn = super::cross3(&(&points[t[1]] - a), &(&points[t[2]] - a));
        if nn.norm() <= eps * eps {
            continue;
        }
        let n = &nn / nn.norm();
        let off = n.dot(a);
        if planes.iter().any(|(m, o, _)| (m - &n).norm() < 1e-6 && (o - off).abs() <= 10.0 * eps) {
            continue;
        }
        let on: Vec<usize> = cand.iter().copied().filter(|&i| (n.dot(&points[i]) - off).abs() <= 10.0 * eps).collect();
        planes.push((n, off, on));
    }

    let mut facets_pts: Vec<(RealVector, Vec<usize>)> = Vec::new();
    for (n, _, on) in planes {
        if on.len() < 3 {
            continue;
        }
        let (u, w) = plane_basis(&n);
        let local: Vec<[f64; 2]> = on.iter().map(|&i| [u.dot(&points[i]), w.dot(&points[i])]).collect();
        let ring = hull_2d(&local, GEOM_EPS * scale * scale);
        if ring.len() < 3 {
            continue;
        }
        let cyc: Vec<usize> = ring.iter().map(|&r| on[r]).collect();
        if facets_pts.iter().any(|(_, c)| same_cycle(c, &cyc)) {
            continue;
        }
        facets_pts.push((n, cyc));
    }
    if facets_pts.len() < 4 {
        return Err(GeomError::DegenerateHull);
    }
    let used: BTreeSet<usize> = facets_pts.iter().flat_map(|(_, c)| c.iter().copied()).collect();
    let mut vidx: Vec<usize> = used.into_iter().collect();
    vidx.sort_by(|&a, &b| lex_cmp(&points[a], &points[b]));
    let remap: HashMap<usize, usize> = vidx.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let verts: Vec<RealVector> = vidx.iter().map(|&i| points[i].clone()).collect();
    let facets: Vec<Facet> = facets_pts
        .into_iter()
        .map(|(_, cyc)| {
            let ring: Vec<usize> = cyc.iter().map(|i| remap[i]).collect();
            Facet::from_ring(&verts, ring)
        })
        .collect();
    Ok(ConvexPolytope::from_parts(3, verts, facets))
}

fn same_cycle(a: &[usize], b: &[usize]) -> bool {
    let sa: BTreeSet<usize> = a.iter().copied().collect();
    let sb: BTreeSet<usize> = b.iter().copied().collect();
    sa == sb
}

/// Orthonormal (u, w) with u x w = n.
pub(crate) fn plane_basis(n: &RealVector) -> (RealVector, RealVector) {
    let pick = if n[0].abs() < 0.6 { rvec(&[1.0, 0.0, 0.0]) } else { rvec(&[0.0, 1.0, 0.0]) };
    let u = super::cross3(&pick, n);
    let u = &u / u.norm();
    let w = super::cross3(n, &u);
    (u, w)
}
