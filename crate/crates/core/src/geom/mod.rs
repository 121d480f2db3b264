//! Low-dimensional convex geometry and integer lattice algebra.
//!
//! Hulls, halfspace intersections and face lattices are supported for d = 2 and
//! d = 3 only. Lattice routines work in any dimension and use exact integers.

mod body;
pub mod export;
mod halfspace;
mod hull;
pub mod lattice;
mod minkowski;
mod polytope;
pub mod shapes;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use body::Body;
pub use halfspace::{halfspace_body, halfspace_intersection, halfspace_intersection_bounded};
pub use hull::convex_hull;
pub(crate) use hull::plane_basis;
pub use lattice::{kernel_sublattice, lattice_reduce, CosetFrame, KernelSublattice, LatticeReduction};
pub use minkowski::{minkowski_diff_segment, minkowski_sum};
pub use polytope::{polytope_measure, ConvexPolytope, Facet, Measure};

/// Points and directions in R^d.
pub type RealVector = DVector<f64>;

/// Relative tolerance for geometric predicates.
pub const GEOM_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("points are not full-dimensional")]
    DegenerateHull,
    #[error("halfspace intersection is unbounded")]
    Unbounded,
    #[error("halfspace intersection is empty")]
    Empty,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("zero vector")]
    ZeroVector,
    #[error("dimension {0} is not supported here (need 2 or 3)")]
    UnsupportedDimension(usize),
}

/// Integer point or lattice vector. Ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntVector(pub Vec<i64>);

impl IntVector {
    pub fn new(coords: Vec<i64>) -> Self {
        IntVector(coords)
    }

    pub fn zeros(d: usize) -> Self {
        IntVector(vec![0; d])
    }

    pub fn unit(d: usize, i: usize) -> Self {
        let mut c = vec![0; d];
        c[i] = 1;
        IntVector(c)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn dot(&self, other: &IntVector) -> i64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> i64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }

    pub fn max_abs(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    pub fn scaled(&self, s: i64) -> IntVector {
        IntVector(self.0.iter().map(|c| c * s).collect())
    }

    pub fn to_real(&self) -> RealVector {
        RealVector::from_iterator(self.dim(), self.0.iter().map(|&c| c as f64))
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<i64>> for IntVector {
    fn from(v: Vec<i64>) -> Self {
        IntVector(v)
    }
}

impl<const N: usize> From<[i64; N]> for IntVector {
    fn from(v: [i64; N]) -> Self {
        IntVector(v.to_vec())
    }
}

impl Add for &IntVector {
    type Output = IntVector;
    fn add(self, rhs: &IntVector) -> IntVector {
        IntVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &IntVector {
    type Output = IntVector;
    fn sub(self, rhs: &IntVector) -> IntVector {
        IntVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &IntVector {
    type Output = IntVector;
    fn neg(self) -> IntVector {
        IntVector(self.0.iter().map(|a| -a).collect())
    }
}

/// Columns of a lattice basis. Integer columns are kept when the lattice is a
/// sublattice of Z^d.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisMatrix {
    columns: DMatrix<f64>,
    integer: Option<Vec<IntVector>>,
}

impl BasisMatrix {
    pub fn identity(d: usize) -> Self {
        Self::from_int_columns((0..d).map(|i| IntVector::unit(d, i)).collect())
    }

    pub fn from_int_columns(cols: Vec<IntVector>) -> Self {
        let d = cols.first().map_or(0, |c| c.dim());
        let columns = DMatrix::from_fn(d, cols.len(), |i, j| cols[j].0[i] as f64);
        BasisMatrix { columns, integer: Some(cols) }
    }

    pub fn from_real(columns: DMatrix<f64>) -> Self {
        BasisMatrix { columns, integer: None }
    }

    pub fn scaled_identity(d: usize, s: i64) -> Self {
        Self::from_int_columns((0..d).map(|i| IntVector::unit(d, i).scaled(s)).collect())
    }

    pub fn dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn rank_columns(&self) -> usize {
        self.columns.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.columns
    }

    pub fn int_columns(&self) -> Option<&[IntVector]> {
        self.integer.as_deref()
    }

    pub fn is_full_rank(&self) -> bool {
        self.columns.is_square() && self.det().abs() > GEOM_EPS
    }

    /// Signed determinant; zero when the matrix is not square.
    pub fn det(&self) -> f64 {
        if !self.columns.is_square() {
            return 0.0;
        }
        if let Some(cols) = &self.integer {
            return lattice::int_det(cols) as f64;
        }
        self.columns.determinant()
    }
}

/// Affine hyperplane {x : <n, x> = offset} with unit normal n.
#[derive(Clone, Debug, PartialEq)]
pub struct Hyperplane {
    pub normal: RealVector,
    pub offset: f64,
}

impl Hyperplane {
    /// Normalizes `normal`, rescaling the offset to match.
    pub fn new(normal: RealVector, offset: f64) -> Result<Self, GeomError> {
        let n = normal.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(GeomError::ZeroVector);
        }
        Ok(Hyperplane { normal: normal / n, offset: offset / n })
    }

    pub fn eval(&self, x: &RealVector) -> f64 {
        self.normal.dot(x) - self.offset
    }
}

pub fn rvec(c: &[f64]) -> RealVector {
    RealVector::from_column_slice(c)
}

pub(crate) fn lex_cmp(a: &RealVector, b: &RealVector) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Lexicographic comparison treating coordinates within `tol` as equal.
pub(crate) fn lex_cmp_tol(a: &RealVector, b: &RealVector, tol: f64) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        if (x - y).abs() <= tol {
            continue;
        }
        return x.total_cmp(y);
    }
    Ordering::Equal
}

pub(crate) fn cross3(a: &RealVector, b: &RealVector) -> RealVector {
    rvec(&[a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]])
}

/// Vector n with <n, a_i> = 0 for the d-1 inputs and det(a_1, .., a_{d-1}, n) = |n|^2.
/// Its norm is the (d-1)-volume spanned by the inputs.
pub fn generalized_cross(vs: &[RealVector]) -> RealVector {
    let d = vs.len() + 1;
    let mut out = RealVector::zeros(d);
    for i in 0..d {
        let m = DMatrix::from_fn(d, d, |r, c| if c < d - 1 { vs[c][r] } else if r == i { 1.0 } else { 0.0 });
        out[i] = m.determinant();
    }
    out
}

/// Scale used to turn relative tolerances into absolute ones.
pub(crate) fn point_scale(points: &[RealVector]) -> f64 {
    points.iter().flat_map(|p| p.iter()).fold(1.0f64, |m, c| m.max(c.abs()))
}

#[cfg(test)]
mod tests;
