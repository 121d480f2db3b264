//! Recovery configurations for polytopes and the perimeter bound for
//! spanning potentials.

use itertools::Itertools;

use super::{missing_bonds, Configuration, Convention, EnergyError, Potential};
use crate::geom::lattice::{int_det, unit_expansions};
use crate::geom::{lattice_reduce, polytope_measure, ConvexPolytope, IntVector, RealVector};

#[derive(Clone, Debug)]
pub struct Recovery {
    pub configuration: Configuration,
    /// #Y before correction.
    pub y_count: usize,
    /// Points added (positive) or removed (negative).
    pub correction: i64,
    /// |correction| / (H^{d-1}(∂E) N^{(d-1)/d}).
    pub correction_ratio: f64,
}

/// Generic tie-break direction for boundary points.
fn tie_direction(d: usize) -> Vec<f64> {
    (0..d).map(|i| 1.0 + 0.123_456_7 * i as f64).collect()
}

struct Region {
    normals: Vec<Vec<f64>>,
    offsets: Vec<f64>,
    /// ⟨n, u⟩ for the tie-break direction u.
    drift: Vec<f64>,
    tol: f64,
}

impl Region {
    fn new(e: &ConvexPolytope, shift: &RealVector, s: f64) -> Self {
        let u = tie_direction(e.dim());
        let mut normals = Vec::new();
        let mut offsets = Vec::new();
        let mut drift = Vec::new();
        for f in e.facets() {
            let n: Vec<f64> = f.normal.iter().copied().collect();
            offsets.push(s * (f.offset - f.normal.dot(shift)));
            drift.push(n.iter().zip(&u).map(|(a, b)| a * b).sum());
            normals.push(n);
        }
        Region { normals, offsets, drift, tol: 1e-9 * s.max(1.0) }
    }

    /// Half-open membership: boundary points belong if a small step along the
    /// tie-break direction enters the interior.
    fn contains(&self, z: &[i64]) -> bool {
        for ((n, h), dr) in self.normals.iter().zip(&self.offsets).zip(&self.drift) {
            let val: f64 = n.iter().zip(z).map(|(a, &b)| a * b as f64).sum::<f64>() - h;
            if val > self.tol || (val.abs() <= self.tol && *dr > 0.0) {
                return false;
            }
        }
        true
    }

    /// Real interval of the first coordinate allowed by facets with n_0 != 0,
    /// for fixed remaining coordinates.
    fn row_interval(&self, rest: &[i64]) -> (f64, f64) {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (n, h) in self.normals.iter().zip(&self.offsets) {
            if n[0].abs() < 1e-12 {
                continue;
            }
            let r: f64 = n[1..].iter().zip(rest).map(|(a, &b)| a * b as f64).sum();
            let t = (h - r) / n[0];
            if n[0] > 0.0 {
                hi = hi.min(t);
            } else {
                lo = lo.max(t);
            }
        }
        (lo, hi)
    }
}

/// Lattice points of the half-open body s·(E − lo) where lo is E's min corner.
fn scaled_points(e: &ConvexPolytope, s: f64) -> Vec<IntVector> {
    let d = e.dim();
    let (lo, hi) = e.bounds();
    let region = Region::new(e, &lo, s);
    let ext: Vec<i64> = (0..d).map(|i| (s * (hi[i] - lo[i])).ceil() as i64 + 1).collect();
    let mut out = Vec::new();
    let mut rest = vec![-1i64; d - 1];
    let mut z = vec![0i64; d];
    loop {
        let (a, b) = region.row_interval(&rest);
        let first = (a - region.tol).ceil().max(-1.0) as i64;
        let last = (b + region.tol).floor().min(ext[0] as f64) as i64;
        if first <= last {
            z[1..].copy_from_slice(&rest);
            // interior of the row shares the verdict of its midpoint
            let mid_ok = if last - first >= 2 {
                z[0] = (first + last) / 2;
                region.contains(&z)
            } else {
                false
            };
            for x in first..=last {
                z[0] = x;
                let edge = x <= first + 1 || x >= last - 1;
                let ok = if edge || last - first < 2 { region.contains(&z) } else { mid_ok };
                if ok {
                    out.push(IntVector(z.clone()));
                }
            }
        }
        // advance the remaining coordinates over [-1, ext]
        let mut i = d - 1;
        loop {
            if i == 0 {
                out.sort_unstable();
                return out;
            }
            i -= 1;
            if rest[i] < ext[i + 1] {
                rest[i] += 1;
                break;
            }
            rest[i] = -1;
        }
    }
}

/// Exactly N points approximating N^{1/d}E, for |E| = 1.
///
/// Y = (N^{1/d}E) ∩ Z^d is corrected at its lexicographically smallest point
/// a: missing points fill a quasi-cube on the low side of a in the first
/// coordinate; surplus points are removed closest to a first.
pub fn recovery_configuration(e: &ConvexPolytope, n: usize) -> Result<Recovery, EnergyError> {
    let d = e.dim();
    if n == 0 || d < 2 {
        return Err(EnergyError::InfeasibleCount { n, threshold: 1 });
    }
    let s = (n as f64).powf(1.0 / d as f64);
    let mut y = scaled_points(e, s);
    let y_count = y.len();
    if y.is_empty() {
        return Err(EnergyError::InfeasibleCount { n, threshold: n + 1 });
    }
    let k = (y_count as i64 - n as i64).unsigned_abs() as usize;
    if y_count > n && k >= y_count {
        return Err(EnergyError::InfeasibleCount { n, threshold: y_count });
    }
    let a = y[0].clone();
    let side = ((k as f64).powf(1.0 / d as f64).ceil() as i64).max(1);
    // guard against floating error in the root
    let side = if side.pow(d as u32) < k as i64 { side + 1 } else { side };
    let correction;
    if y_count < n {
        let mut cluster = Vec::with_capacity(k);
        // layer x_0 = a_0 - 1 first, then further out
        'outer: for layer in 1..=side {
            let mut idx = vec![0i64; d - 1];
            loop {
                let mut p = vec![a.0[0] - layer];
                p.extend(idx.iter().zip(&a.0[1..]).map(|(i, c)| c + i));
                cluster.push(IntVector(p));
                if cluster.len() == k {
                    break 'outer;
                }
                let mut j = d - 1;
                loop {
                    if j == 0 {
                        continue 'outer;
                    }
                    j -= 1;
                    if idx[j] < side - 1 {
                        idx[j] += 1;
                        break;
                    }
                    idx[j] = 0;
                }
            }
        }
        y.extend(cluster);
        correction = k as i64;
    } else if y_count > n {
        let mut order: Vec<usize> = (0..y.len()).collect();
        let cheb = |p: &IntVector| p.0.iter().zip(&a.0).map(|(x, c)| (x - c).abs()).max().unwrap_or(0);
        order.sort_by(|&i, &j| cheb(&y[i]).cmp(&cheb(&y[j])).then_with(|| y[i].cmp(&y[j])));
        let drop: std::collections::HashSet<usize> = order[..k].iter().copied().collect();
        y = y.into_iter().enumerate().filter(|(i, _)| !drop.contains(i)).map(|(_, p)| p).collect();
        correction = -(k as i64);
    } else {
        correction = 0;
    }
    let area: f64 = polytope_measure(e).facets.iter().map(|(_, a)| a).sum();
    let ratio = k as f64 / (area * (n as f64).powf((d - 1) as f64 / d as f64));
    Ok(Recovery { configuration: Configuration::new(d, y), y_count, correction, correction_ratio: ratio })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerimeterBound {
    pub k: f64,
    /// P(E_1(X)): exposed unit faces of the union of unit cubes.
    pub perimeter: f64,
    pub surface_energy: f64,
    pub holds: bool,
    /// Vectors used for the unit expansions.
    pub basis: Vec<IntVector>,
}

/// Constant K with P(E_1(X)) <= K F(X), and the check on X.
pub fn perimeter_bound(x: &Configuration, v: &Potential) -> Result<PerimeterBound, EnergyError> {
    if v.convention() != Convention::Crystal {
        return Err(EnergyError::WrongConvention(Convention::Crystal));
    }
    let d = v.dim();
    let support = v.support();
    let red = lattice_reduce(&support);
    if red.rank < d || (red.det - 1.0).abs() > 1e-9 {
        return Err(EnergyError::SpanDeficient { rank: red.rank, det: red.det });
    }
    let unimodular = support.iter().cloned().combinations(d).find(|b| int_det(b).abs() == 1);
    let (basis, a_max) = match unimodular {
        Some(b) => {
            let coeffs = unit_expansions(&b).expect("unimodular basis");
            (b, coeffs.iter().flatten().map(|c| c.abs()).max().unwrap_or(0))
        }
        None => {
            let coeffs = unit_expansions(&support).expect("span is Z^d");
            (support.clone(), coeffs.iter().flatten().map(|c| c.abs()).max().unwrap_or(0))
        }
    };
    let c = basis.iter().map(|b| -v.weight(b)).fold(f64::INFINITY, f64::min);
    let k = 2.0 * basis.len() as f64 * a_max as f64 / c;
    let unit = Potential::nearest_neighbor(d, -1.0);
    let perimeter = 2.0 * missing_bonds(x, &unit).iter().filter(|(w, _)| w.0.iter().all(|&c| c >= 0)).map(|(_, &m)| m as f64).sum::<f64>();
    let f = super::surface_energy(x, v);
    Ok(PerimeterBound { k, perimeter, surface_energy: f, holds: perimeter <= k * f + 1e-9, basis })
}
