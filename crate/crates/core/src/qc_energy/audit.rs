//! Empirical subtiling densities against ρ_J.

use serde::Serialize;

use crate::multigrid::{ball_volume, dual_lattice_info, for_each_dual_point, MultigridError, MultigridSpec, Region};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubsetDensity {
    pub j: Vec<usize>,
    pub count: usize,
    /// Ball volume / det Λ_J.
    pub expected_count: f64,
    /// Share of the total tile volume carried by tiles of class J.
    pub area_fraction: f64,
    pub rho: f64,
    pub rel_err: f64,
}

/// Subsets grouped by tile volume (congruence class for unit edges).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassFraction {
    pub tile_volume: f64,
    pub subsets: usize,
    pub fraction: f64,
    pub expected: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityAudit {
    pub radius: f64,
    pub subsets: Vec<SubsetDensity>,
    /// Classes by decreasing tile volume.
    pub classes: Vec<ClassFraction>,
    pub rho_sum: f64,
    pub max_rel_err: f64,
}

/// Counts the dual points of each Λ_J in the dual ball of the given radius
/// around the origin and compares tile-volume fractions with ρ_J.
pub fn density_audit(spec: &MultigridSpec, radius: f64) -> Result<DensityAudit, MultigridError> {
    let subsets = spec.subsets();
    let mut counts = vec![0usize; subsets.len()];
    let mut last: Option<(Vec<usize>, usize)> = None;
    for_each_dual_point(spec, &Region::centered(spec.dim(), radius), |p| {
        // points arrive grouped by J
        let i = match &last {
            Some((j, i)) if *j == p.j => *i,
            _ => {
                let i = subsets.iter().position(|j| *j == p.j).expect("J is a d-subset");
                last = Some((p.j.clone(), i));
                i
            }
        };
        counts[i] += 1;
    })?;
    let vols: Vec<f64> = subsets.iter().map(|j| spec.edges_volume(j)).collect();
    let total: f64 = counts.iter().zip(&vols).map(|(&c, v)| c as f64 * v).sum();
    let ball = ball_volume(spec.dim(), radius);
    let mut rows = Vec::new();
    for ((j, &c), v) in subsets.iter().zip(&counts).zip(&vols) {
        let info = dual_lattice_info(spec, j)?;
        let frac = if total > 0.0 { c as f64 * v / total } else { 0.0 };
        rows.push(SubsetDensity {
            j: j.clone(),
            count: c,
            expected_count: ball / info.covolume,
            area_fraction: frac,
            rho: info.density,
            rel_err: (frac - info.density).abs() / info.density,
        });
    }
    let mut classes: Vec<ClassFraction> = Vec::new();
    for (r, v) in rows.iter().zip(&vols) {
        match classes.iter_mut().find(|c| (c.tile_volume - v).abs() <= 1e-9 * v.max(1.0)) {
            Some(c) => {
                c.subsets += 1;
                c.fraction += r.area_fraction;
                c.expected += r.rho;
            }
            None => classes.push(ClassFraction { tile_volume: *v, subsets: 1, fraction: r.area_fraction, expected: r.rho }),
        }
    }
    classes.sort_by(|a, b| b.tile_volume.total_cmp(&a.tile_volume));
    Ok(DensityAudit {
        radius,
        rho_sum: rows.iter().map(|r| r.rho).sum(),
        max_rel_err: rows.iter().map(|r| r.rel_err).fold(0.0, f64::max),
        subsets: rows,
        classes,
    })
}
