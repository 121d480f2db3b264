//! Exact integer lattice algebra: Hermite normal form, kernels of linear forms
//! and coset arithmetic for full-rank integer bases.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{BasisMatrix, GeomError, IntVector};

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeReduction {
    /// Rows of the Hermite normal form, as integer column vectors.
    pub basis: BasisMatrix,
    pub rank: usize,
    /// Covolume within the span: sqrt(det Gram).
    pub det: f64,
}

/// Row-style Hermite normal form over the integers. Returns the nonzero rows
/// and, if requested, the unimodular transform U with U * A = H (rows of A).
pub(crate) fn hermite_rows(rows: &[Vec<BigInt>], track: bool) -> (Vec<Vec<BigInt>>, Option<Vec<Vec<BigInt>>>) {
    let n = rows.len();
    let d = rows.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::from(1) } else { BigInt::zero() }).collect())
        .collect();
    let mut r = 0;
    for col in 0..d {
        if r == n {
            break;
        }
        loop {
            let piv = (r..n).filter(|&i| !a[i][col].is_zero()).min_by(|&x, &y| a[x][col].abs().cmp(&a[y][col].abs()));
            let Some(p) = piv else { break };
            a.swap(r, p);
            u.swap(r, p);
            let mut done = true;
            for i in r + 1..n {
                if a[i][col].is_zero() {
                    continue;
                }
                let q = a[i][col].div_floor(&a[r][col]);
                sub_row(&mut a, i, r, &q);
                if track {
                    sub_row(&mut u, i, r, &q);
                }
                if !a[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < n && !a[r][col].is_zero() {
            if a[r][col].is_negative() {
                neg_row(&mut a, r);
                if track {
                    neg_row(&mut u, r);
                }
            }
            for i in 0..r {
                let q = a[i][col].div_floor(&a[r][col]);
                if !q.is_zero() {
                    sub_row(&mut a, i, r, &q);
                    if track {
                        sub_row(&mut u, i, r, &q);
                    }
                }
            }
            r += 1;
        }
    }
    a.truncate(r);
    (a, if track { Some(u) } else { None })
}

fn sub_row(m: &mut [Vec<BigInt>], i: usize, r: usize, q: &BigInt) {
    let src = m[r].clone();
    for (x, s) in m[i].iter_mut().zip(src) {
        *x -= q * s;
    }
}

fn neg_row(m: &mut [Vec<BigInt>], r: usize) {
    for x in m[r].iter_mut() {
        *x = -x.clone();
    }
}

fn to_big(v: &IntVector) -> Vec<BigInt> {
    v.0.iter().map(|&c| BigInt::from(c)).collect()
}

fn from_big(v: &[BigInt]) -> IntVector {
    IntVector(v.iter().map(|c| c.to_i64().expect("lattice entry overflows i64")).collect())
}

fn big_det(m: &[Vec<BigInt>]) -> BigInt {
    // fraction-free Bareiss elimination
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut a = m.to_vec();
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else { return BigInt::zero() };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    a[n - 1][n - 1].clone() * sign
}

pub(crate) fn int_det(cols: &[IntVector]) -> i128 {
    let m: Vec<Vec<BigInt>> = cols.iter().map(to_big).collect();
    big_det(&m).to_i128().expect("determinant overflows i128")
}

fn gram_sqrt(rows: &[Vec<BigInt>]) -> f64 {
    let g: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|a| rows.iter().map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum()).collect())
        .collect();
    big_det(&g).to_f64().unwrap_or(f64::INFINITY).sqrt()
}

/// Hermite-form basis, rank and covolume of the integer span of `vectors`.
pub fn lattice_reduce(vectors: &[IntVector]) -> LatticeReduction {
    let rows: Vec<Vec<BigInt>> = vectors.iter().map(to_big).collect();
    let (h, _) = hermite_rows(&rows, false);
    let rank = h.len();
    let det = if rank == 0 { 0.0 } else { gram_sqrt(&h) };
    let cols: Vec<IntVector> = h.iter().map(|r| from_big(r)).collect();
    let basis = if cols.is_empty() {
        BasisMatrix::from_real(nalgebra::DMatrix::zeros(vectors.first().map_or(0, |v| v.dim()), 0))
    } else {
        BasisMatrix::from_int_columns(cols)
    };
    LatticeReduction { basis, rank, det }
}

/// Integer coefficients expressing each unit vector e_i over `vectors`, when
/// their span is all of Z^d.
pub(crate) fn unit_expansions(vectors: &[IntVector]) -> Option<Vec<Vec<i64>>> {
    let d = vectors.first()?.dim();
    let rows: Vec<Vec<BigInt>> = vectors.iter().map(to_big).collect();
    let (h, u) = hermite_rows(&rows, true);
    let u = u?;
    let ident = (0..d).all(|i| (0..d).all(|j| h.get(i).map(|r| r[j] == BigInt::from((i == j) as i64)).unwrap_or(false)));
    if !ident {
        return None;
    }
    Some((0..d).map(|i| u[i].iter().map(|c| c.to_i64().expect("coefficient overflow")).collect()).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelSublattice {
    pub v: IntVector,
    /// Hermite-reduced basis of {w in Z^d : <w, v> = 0}.
    pub basis: Vec<IntVector>,
    pub cell_measure: f64,
    /// Index of the lattice spanned by the kernel and v.
    pub coset_count: u64,
}

pub fn kernel_sublattice(v: &IntVector) -> Result<KernelSublattice, GeomError> {
    if v.is_zero() {
        return Err(GeomError::ZeroVector);
    }
    let d = v.dim();
    // column operations on the 1 x d row v, tracked in U, reduce it to (g, 0, .., 0)
    let rows: Vec<Vec<BigInt>> = v.0.iter().map(|&c| vec![BigInt::from(c)]).collect();
    let (_, u) = hermite_rows(&rows, true);
    let u = u.expect("tracked");
    // rows 1.. of U annihilate v
    let kernel_rows: Vec<Vec<BigInt>> = u[1..].to_vec();
    let (h, _) = hermite_rows(&kernel_rows, false);
    let basis: Vec<IntVector> = h.iter().map(|r| from_big(r)).collect();
    debug_assert_eq!(basis.len(), d - 1);
    let cell_measure = if d == 1 { 1.0 } else { gram_sqrt(&h) };
    let g = v.0.iter().fold(0i64, |g, &c| g.gcd(&c));
    let coset_count = (v.norm_sq() / g) as u64;
    Ok(KernelSublattice { v: v.clone(), basis, cell_measure, coset_count })
}

/// Coordinates with respect to a full-rank integer basis, done exactly with
/// the adjugate. Used to reduce points into the half-open fundamental cell.
#[derive(Clone, Debug)]
pub struct CosetFrame {
    cols: Vec<IntVector>,
    adj: Vec<Vec<i128>>,
    det: i128,
}

impl CosetFrame {
    pub fn new(cols: Vec<IntVector>) -> Result<Self, GeomError> {
        let d = cols.len();
        let det = int_det(&cols);
        if det == 0 {
            return Err(GeomError::DegenerateHull);
        }
        // adj[i][j] = (-1)^{i+j} * minor(j, i) of the matrix with these columns
        let mut adj = vec![vec![0i128; d]; d];
        for i in 0..d {
            for j in 0..d {
                let minor: Vec<IntVector> = (0..d)
                    .filter(|&c| c != i)
                    .map(|c| IntVector((0..d).filter(|&r| r != j).map(|r| cols[c].0[r]).collect()))
                    .collect();
                let m = if d == 1 { 1 } else { int_det(&minor) };
                adj[i][j] = if (i + j) % 2 == 0 { m } else { -m };
            }
        }
        Ok(CosetFrame { cols, adj, det })
    }

    /// Index of the lattice in Z^d.
    pub fn index(&self) -> u64 {
        self.det.unsigned_abs() as u64
    }

    fn numerators(&self, x: &IntVector) -> Vec<i128> {
        self.adj.iter().map(|row| row.iter().zip(&x.0).map(|(a, &b)| a * b as i128).sum()).collect()
    }

    /// Representative of x modulo the lattice inside the half-open cell.
    pub fn reduce(&self, x: &IntVector) -> IntVector {
        let num = self.numerators(x);
        let mut out = x.0.clone();
        for (i, n) in num.iter().enumerate() {
            let f = n.div_floor(&self.det) as i64;
            if f != 0 {
                for (o, c) in out.iter_mut().zip(&self.cols[i].0) {
                    *o -= f * c;
                }
            }
        }
        IntVector(out)
    }

    /// Integer points of the half-open cell, in lexicographic order.
    pub fn cell_points(&self) -> Vec<IntVector> {
        let d = self.cols.len();
        let mut lo = vec![0i64; d];
        let mut hi = vec![0i64; d];
        for c in &self.cols {
            for r in 0..d {
                if c.0[r] < 0 {
                    lo[r] += c.0[r];
                } else {
                    hi[r] += c.0[r];
                }
            }
        }
        let mut out = Vec::new();
        let mut cur = lo.clone();
        loop {
            let x = IntVector(cur.clone());
            if self.reduce(&x) == x {
                out.push(x);
            }
            let mut i = d;
            loop {
                if i == 0 {
                    out.sort();
                    return out;
                }
                i -= 1;
                if cur[i] < hi[i] {
                    cur[i] += 1;
                    break;
                }
                cur[i] = lo[i];
            }
        }
    }
}

impl KernelSublattice {
    /// Frame for Λ_v = Λ_{v⊥} ⊕ Z v.
    pub fn frame(&self) -> CosetFrame {
        let mut cols = self.basis.clone();
        cols.push(self.v.clone());
        CosetFrame::new(cols).expect("kernel and v span a full-rank lattice")
    }
}
