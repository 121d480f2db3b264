//! Recovery tile sets for a body E: the dual points of the rescaled body
//! (N/ρ_X)^{1/d}E, corrected to exactly N by a cluster at its lexicographically
//! smallest point.

use std::cmp::Ordering;
use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use super::{perimeter_p_w, tile_energy, DualKey, QcError, RailPotential, TileSet};
use crate::geom::{lex_cmp, polytope_measure, ConvexPolytope, RealVector};
use crate::multigrid::{
    affine_map_and_bound, ball_volume, dual_density, dual_points_in_region, tile_of, validate_spec, AffineMap, DualPoint, MultigridSpec, Region,
    TileGrid,
};

#[derive(Clone, Debug)]
pub struct QcRecovery {
    pub tiles: TileSet,
    /// (N/ρ_X)^{1/d}.
    pub scale: f64,
    /// #Y before correction.
    pub y_count: usize,
    /// Points added (positive) or removed (negative).
    pub correction: i64,
    /// |correction| / (H^{d-1}(∂E) N^{(d-1)/d}).
    pub correction_ratio: f64,
    /// Smallest admissible N: ρ_X times the volume of a ball whose radius is
    /// the dual image of the largest tile diameter.
    pub threshold: f64,
}

/// Feasibility threshold of `qc_recovery`.
pub fn recovery_threshold(spec: &MultigridSpec) -> f64 {
    let a = affine_map_and_bound(spec);
    let h = AffineMap::max_tile_diameter(spec) * a.inverse_norm();
    dual_density(spec) * ball_volume(spec.dim(), h)
}

fn by_distance(a: &RealVector) -> impl Fn(&DualPoint, &DualPoint) -> Ordering + '_ {
    move |p, q| (&p.x - a).norm_squared().total_cmp(&(&q.x - a).norm_squared()).then_with(|| p.key().cmp(&q.key()))
}

/// Exactly N dual points approximating (N/ρ_X)^{1/d}E for a body with |E| = 1.
pub fn qc_recovery(e: &ConvexPolytope, n: usize, spec: &MultigridSpec) -> Result<QcRecovery, QcError> {
    validate_spec(spec)?;
    let d = spec.dim();
    if e.dim() != d {
        return Err(QcError::InvalidShape(format!("body has dimension {}, spec {d}", e.dim())));
    }
    let m = polytope_measure(e);
    if (m.volume - 1.0).abs() > 1e-6 {
        return Err(QcError::InvalidShape(format!("|E| = {} but must be 1", m.volume)));
    }
    let threshold = recovery_threshold(spec);
    if (n as f64) < threshold {
        return Err(QcError::InfeasibleCount { n, threshold });
    }
    let rho = dual_density(spec);
    let s = (n as f64 / rho).powf(1.0 / d as f64);
    let se = e.scaled(s);
    let c = se.centroid_of_vertices();
    let r = se.vertices().iter().map(|v| (v - &c).norm()).fold(0.0, f64::max);
    let mut y: Vec<DualPoint> = dual_points_in_region(spec, &Region::ball(c, r))?.into_iter().filter(|p| se.contains(&p.x, 0.0)).collect();
    let y_count = y.len();
    let anchor = y.iter().map(|p| &p.x).min_by(|a, b| lex_cmp(a, b)).cloned().ok_or(QcError::InfeasibleCount { n, threshold })?;
    let k = n as i64 - y_count as i64;
    if k < 0 {
        let remove = (-k) as usize;
        if remove >= y_count {
            return Err(QcError::InfeasibleCount { n, threshold });
        }
        let mut order: Vec<usize> = (0..y.len()).collect();
        let cmp = by_distance(&anchor);
        order.sort_by(|&i, &j| cmp(&y[i], &y[j]));
        let drop: HashSet<usize> = order[..remove].iter().copied().collect();
        y = y.into_iter().enumerate().filter(|(i, _)| !drop.contains(i)).map(|(_, p)| p).collect();
    } else if k > 0 {
        let have: HashSet<DualKey> = y.iter().map(|p| p.key()).collect();
        let mut radius = ((4 * k + 16) as f64 / (rho * ball_volume(d, 1.0))).powf(1.0 / d as f64);
        loop {
            let mut cand: Vec<DualPoint> = dual_points_in_region(spec, &Region::ball(anchor.clone(), radius))?
                .into_iter()
                .filter(|p| !have.contains(&p.key()))
                .collect();
            if cand.len() >= k as usize {
                cand.sort_by(by_distance(&anchor));
                y.extend(cand.into_iter().take(k as usize));
                break;
            }
            radius *= 2.0;
        }
    }
    let boundary: f64 = m.facets.iter().map(|(_, a)| a).sum();
    Ok(QcRecovery {
        tiles: TileSet::new(y)?,
        scale: s,
        y_count,
        correction: k,
        correction_ratio: k.unsigned_abs() as f64 / (boundary * (n as f64).powf((d - 1) as f64 / d as f64)),
        threshold,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QcRow {
    pub n: usize,
    pub y_count: usize,
    pub correction: i64,
    /// Oriented boundary energy E_W(T_N).
    pub energy: f64,
    /// E_W(T_N) / (N ā)^{(d-1)/d}, ā = det A / ρ_X the mean tile volume.
    pub rescaled: f64,
    /// E_W(T_N) / N^{(d-1)/d}.
    pub literal: f64,
    pub target: f64,
    pub rel_err: f64,
}

/// Recovery energies for each N against P_W(E). The N values are independent.
pub fn qc_convergence(spec: &MultigridSpec, pot: &RailPotential, e: &ConvexPolytope, ns: &[usize]) -> Result<Vec<QcRow>, QcError> {
    let d = spec.dim() as f64;
    let abar = affine_map_and_bound(spec).det() / dual_density(spec);
    let target = perimeter_p_w(e, spec, pot);
    ns.par_iter()
        .map(|&n| {
            let rec = qc_recovery(e, n, spec)?;
            let en = tile_energy(spec, &rec.tiles, pot)?;
            let expo = (d - 1.0) / d;
            let rescaled = en.oriented / (n as f64 * abar).powf(expo);
            Ok(QcRow {
                n,
                y_count: rec.y_count,
                correction: rec.correction,
                energy: en.oriented,
                rescaled,
                literal: en.oriented / (n as f64).powf(expo),
                target,
                rel_err: (rescaled - target).abs() / target,
            })
        })
        .collect()
}

/// Volume of E Δ s⁻¹A⁻¹(T_N), estimated on a grid of `per_axis`^d cell
/// centers over the padded bounding box of E.
pub fn symmetric_difference(spec: &MultigridSpec, rec: &QcRecovery, e: &ConvexPolytope, per_axis: usize) -> f64 {
    let a = affine_map_and_bound(spec);
    let tiles: Vec<_> = rec.tiles.points().iter().map(|p| tile_of(spec, p)).collect();
    let grid = TileGrid::new(&tiles, AffineMap::max_tile_diameter(spec).max(1e-6));
    let d = spec.dim();
    let (mut lo, mut hi) = e.bounds();
    let pad = 0.25 * e.diameter();
    lo.add_scalar_mut(-pad);
    hi.add_scalar_mut(pad);
    let step: RealVector = (&hi - &lo) / per_axis as f64;
    let cell: f64 = step.iter().product();
    let total = per_axis.pow(d as u32);
    let bad: usize = (0..total)
        .into_par_iter()
        .filter(|&idx| {
            let mut rest = idx;
            let z = RealVector::from_fn(d, |i, _| {
                let c = rest % per_axis;
                rest /= per_axis;
                lo[i] + (c as f64 + 0.5) * step[i]
            });
            let y = a.apply(&(&z * rec.scale));
            let in_union = grid.candidates(&y).iter().any(|&t| tiles[t].contains(&y, 0.0));
            in_union != e.contains(&z, 0.0)
        })
        .count();
    bad as f64 * cell
}
