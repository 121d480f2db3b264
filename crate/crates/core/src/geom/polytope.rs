use std::collections::BTreeSet;

use nalgebra::DMatrix;

use super::{lex_cmp, point_scale, rvec, RealVector};

/// One facet: outward unit normal, offset <n, x> = offset, and vertex indices.
/// In d = 3 the ring is counter-clockwise seen from outside; in d = 2 it is the
/// edge (a, b) in counter-clockwise order.
#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    pub normal: RealVector,
    pub offset: f64,
    pub vertices: Vec<usize>,
}

impl Facet {
    pub(crate) fn from_ring(verts: &[RealVector], ring: Vec<usize>) -> Facet {
        let d = verts[ring[0]].len();
        let normal = if d == 2 {
            let e = &verts[ring[1]] - &verts[ring[0]];
            rvec(&[e[1], -e[0]]).normalize()
        } else {
            // Newell's method
            let mut n = RealVector::zeros(3);
            for i in 0..ring.len() {
                let a = &verts[ring[i]];
                let b = &verts[ring[(i + 1) % ring.len()]];
                n += super::cross3(a, b);
            }
            n.normalize()
        };
        let offset = ring.iter().map(|&i| normal.dot(&verts[i])).sum::<f64>() / ring.len() as f64;
        Facet { normal, offset, vertices: ring }
    }
}

/// Bounded full-dimensional convex polytope with vertex and facet descriptions.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolytope {
    dim: usize,
    vertices: Vec<RealVector>,
    facets: Vec<Facet>,
    edges: Vec<(usize, usize)>,
}

/// Volume and per-facet (normal, area).
#[derive(Clone, Debug)]
pub struct Measure {
    pub volume: f64,
    pub facets: Vec<(RealVector, f64)>,
}

impl ConvexPolytope {
    /// Polygon from a counter-clockwise ring.
    pub(crate) fn from_polygon_ring(ring: Vec<RealVector>) -> Self {
        let m = ring.len();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| lex_cmp(&ring[a], &ring[b]));
        let mut pos = vec![0; m];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        let vertices: Vec<RealVector> = order.iter().map(|&i| ring[i].clone()).collect();
        // facets start at the lexicographically smallest vertex
        let start = order[0];
        let facets = (0..m)
            .map(|s| {
                let a = (start + s) % m;
                let b = (a + 1) % m;
                Facet::from_ring(&vertices, vec![pos[a], pos[b]])
            })
            .collect::<Vec<_>>();
        let edges = facets.iter().map(|f| norm_edge(f.vertices[0], f.vertices[1])).collect::<BTreeSet<_>>();
        ConvexPolytope { dim: 2, vertices, facets, edges: edges.into_iter().collect() }
    }

    pub(crate) fn from_parts(dim: usize, vertices: Vec<RealVector>, mut facets: Vec<Facet>) -> Self {
        facets.sort_by(|a, b| lex_cmp(&a.normal, &b.normal));
        let mut edges = BTreeSet::new();
        for f in &facets {
            let r = &f.vertices;
            for i in 0..r.len() {
                edges.insert(norm_edge(r[i], r[(i + 1) % r.len()]));
            }
        }
        ConvexPolytope { dim, vertices, facets, edges: edges.into_iter().collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Vertices in lexicographic order.
    pub fn vertices(&self) -> &[RealVector] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_facets(&self) -> usize {
        self.facets.len()
    }

    /// Counter-clockwise vertex ring of a polygon.
    pub fn ring(&self) -> Vec<usize> {
        assert_eq!(self.dim, 2, "ring is defined for polygons");
        self.facets.iter().map(|f| f.vertices[0]).collect()
    }

    pub fn scale(&self) -> f64 {
        point_scale(&self.vertices)
    }

    pub fn support(&self, u: &RealVector) -> f64 {
        self.vertices.iter().map(|v| v.dot(u)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn centroid_of_vertices(&self) -> RealVector {
        let mut c = RealVector::zeros(self.dim);
        for v in &self.vertices {
            c += v;
        }
        c / self.vertices.len() as f64
    }

    /// Membership with tolerance `tol` on facet inequalities.
    pub fn contains(&self, x: &RealVector, tol: f64) -> bool {
        self.facets.iter().all(|f| f.normal.dot(x) - f.offset <= tol)
    }

    /// Euclidean distance from `x` to the polytope (zero inside).
    pub fn distance(&self, x: &RealVector) -> f64 {
        if self.contains(x, 0.0) {
            return 0.0;
        }
        if self.dim == 2 {
            self.facets
                .iter()
                .map(|f| seg_dist(x, &self.vertices[f.vertices[0]], &self.vertices[f.vertices[1]]))
                .fold(f64::INFINITY, f64::min)
        } else {
            self.facets
                .iter()
                .map(|f| {
                    let pts: Vec<RealVector> = f.vertices.iter().map(|&i| self.vertices[i].clone()).collect();
                    polygon_dist(x, &pts)
                })
                .fold(f64::INFINITY, f64::min)
        }
    }

    pub fn map_vertices(&self, f: impl Fn(&RealVector) -> RealVector) -> Vec<RealVector> {
        self.vertices.iter().map(f).collect()
    }

    pub fn translated(&self, t: &RealVector) -> ConvexPolytope {
        let mut out = self.clone();
        for v in &mut out.vertices {
            *v += t;
        }
        for f in &mut out.facets {
            f.offset += f.normal.dot(t);
        }
        out
    }

    /// Image under x -> s x with s > 0.
    pub fn scaled(&self, s: f64) -> ConvexPolytope {
        assert!(s > 0.0);
        let mut out = self.clone();
        for v in &mut out.vertices {
            *v *= s;
        }
        for f in &mut out.facets {
            f.offset *= s;
        }
        out
    }

    /// Image under an invertible linear map.
    pub fn linear_image(&self, m: &DMatrix<f64>) -> Result<ConvexPolytope, super::GeomError> {
        let pts: Vec<RealVector> = self.vertices.iter().map(|v| m * v).collect();
        super::convex_hull(&pts)
    }

    /// Bounding box (min corner, max corner).
    pub fn bounds(&self) -> (RealVector, RealVector) {
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices {
            for i in 0..self.dim {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        (lo, hi)
    }

    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for a in &self.vertices {
            for b in &self.vertices {
                best = best.max((a - b).norm());
            }
        }
        best
    }
}

fn norm_edge(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

pub(crate) fn seg_dist(x: &RealVector, a: &RealVector, b: &RealVector) -> f64 {
    let ab = b - a;
    let l2 = ab.norm_squared();
    if l2 == 0.0 {
        return (x - a).norm();
    }
    let t = ((x - a).dot(&ab) / l2).clamp(0.0, 1.0);
    (x - (a + ab * t)).norm()
}

fn tri_dist(p: &RealVector, a: &RealVector, b: &RealVector, c: &RealVector) -> f64 {
    let n = super::cross3(&(b - a), &(c - a));
    let nn = n.norm_squared();
    if nn > 0.0 {
        let h = (p - a).dot(&n) / nn;
        let q = p - &n * h;
        // barycentric test via edge orientations
        let s1 = super::cross3(&(b - a), &(&q - a)).dot(&n);
        let s2 = super::cross3(&(c - b), &(&q - b)).dot(&n);
        let s3 = super::cross3(&(a - c), &(&q - c)).dot(&n);
        if s1 >= 0.0 && s2 >= 0.0 && s3 >= 0.0 {
            return (p - q).norm();
        }
    }
    seg_dist(p, a, b).min(seg_dist(p, b, c)).min(seg_dist(p, c, a))
}

/// Distance to a planar convex polygon in R^3 given as an ordered ring.
pub(crate) fn polygon_dist(p: &RealVector, ring: &[RealVector]) -> f64 {
    match ring.len() {
        0 => f64::INFINITY,
        1 => (p - &ring[0]).norm(),
        2 => seg_dist(p, &ring[0], &ring[1]),
        _ => (1..ring.len() - 1).map(|i| tri_dist(p, &ring[0], &ring[i], &ring[i + 1])).fold(f64::INFINITY, f64::min),
    }
}

/// Volume and facet areas. Facet areas are edge lengths in d = 2.
pub fn polytope_measure(p: &ConvexPolytope) -> Measure {
    let v = p.vertices();
    let facets: Vec<(RealVector, f64)> = p
        .facets()
        .iter()
        .map(|f| {
            let area = if p.dim() == 2 {
                (&v[f.vertices[1]] - &v[f.vertices[0]]).norm()
            } else {
                let mut s = RealVector::zeros(3);
                for i in 0..f.vertices.len() {
                    s += super::cross3(&v[f.vertices[i]], &v[f.vertices[(i + 1) % f.vertices.len()]]);
                }
                0.5 * s.dot(&f.normal).abs()
            };
            (f.normal.clone(), area)
        })
        .collect();
    // divergence theorem about the vertex centroid, which keeps offsets small
    let c = p.centroid_of_vertices();
    let d = p.dim() as f64;
    let volume = p
        .facets()
        .iter()
        .zip(&facets)
        .map(|(f, (_, a))| a * (f.offset - f.normal.dot(&c)))
        .sum::<f64>()
        / d;
    Measure { volume, facets }
}
