//! Multigrids M(G, γ): for each normal g the hyperplanes
//! ⟨x, g/|g|⟩ = γ_g + k|g|, k ∈ Z. Every d-subset J of normals meets in a
//! translated lattice Λ_J of dual points; each dual point carries a
//! parallelotope tile spanned by the primal edges g̃, g ∈ J.

mod enumerate;
mod export;
mod tiling;

use itertools::Itertools;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{generalized_cross, rvec, RealVector};

pub use enumerate::{dual_points_in_region, for_each_dual_point, tile_of, DualPoint, Region, Tile};
pub use export::{tile_records, tiles_to_svg};
pub use tiling::{tiles_near, verify_tiling, TilingReport};
pub(crate) use tiling::{ball_volume, TileGrid};

/// Absolute guard band on fractional parts of t_g at dual points.
pub const INCIDENCE_TOL: f64 = 1e-9;
/// Minimum distance between a probed dual point and any other hyperplane.
pub const PROBE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MultigridError {
    #[error("invalid multigrid spec: {0}")]
    InvalidSpec(String),
    #[error("compatibility condition fails on subset {subset:?}: det(G_J)·det(G̃_J) = {product}")]
    DetConditionViolated { subset: Vec<usize>, product: f64 },
    #[error("translations are not generic: {0}")]
    DegenerateTranslations(String),
    #[error("normals of subset {0:?} are linearly dependent")]
    SingularSubset(Vec<usize>),
    #[error("dual point J={j:?} k={k:?} lies within the incidence tolerance of a hyperplane of family {g}")]
    GenericityViolation { j: Vec<usize>, k: Vec<i64>, g: usize },
    #[error("{count} tiles contain the sample point {witness:?}")]
    OverlapDetected { witness: Vec<f64>, count: usize },
    #[error("no tile contains the sample point {witness:?}")]
    GapDetected { witness: Vec<f64> },
}

/// Normals g, translations γ_g and primal edges g̃, in a fixed order that
/// orders every subset.
#[derive(Clone, Debug, PartialEq)]
pub struct MultigridSpec {
    dim: usize,
    normals: Vec<RealVector>,
    translations: Vec<f64>,
    edges: Vec<RealVector>,
    seed: u64,
}

/// On-disk form of a spec. `translations` may be omitted when a seed is given;
/// they are then drawn in (0.05, 0.95). `ordering`, if present, permutes the
/// listed families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDoc {
    pub dimension: usize,
    pub normals: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translations: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primal_edges: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ordering: Option<Vec<usize>>,
}

impl MultigridSpec {
    pub fn new(normals: Vec<RealVector>, translations: Vec<f64>, edges: Vec<RealVector>) -> Result<Self, MultigridError> {
        let dim = normals.first().map(|g| g.len()).unwrap_or(0);
        if dim < 1 {
            return Err(MultigridError::InvalidSpec("no normals".into()));
        }
        if normals.len() < dim {
            return Err(MultigridError::InvalidSpec(format!("{} normals in dimension {dim}", normals.len())));
        }
        if translations.len() != normals.len() || edges.len() != normals.len() {
            return Err(MultigridError::InvalidSpec("normals, translations and primal edges differ in length".into()));
        }
        if normals.iter().chain(&edges).any(|v| v.len() != dim) {
            return Err(MultigridError::InvalidSpec("vector dimension mismatch".into()));
        }
        if normals.iter().any(|g| g.norm() == 0.0) {
            return Err(MultigridError::InvalidSpec("zero normal".into()));
        }
        if translations.iter().chain(normals.iter().flat_map(|v| v.iter())).chain(edges.iter().flat_map(|v| v.iter())).any(|x| !x.is_finite()) {
            return Err(MultigridError::InvalidSpec("non-finite entry".into()));
        }
        Ok(MultigridSpec { dim, normals, translations, edges, seed: 0 })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn unit_directions(n: usize) -> Vec<RealVector> {
        (0..n)
            .map(|j| {
                let a = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                rvec(&[a.cos(), a.sin()])
            })
            .collect()
    }

    /// Five unit normals at angles 2πj/5 with g̃ = g.
    pub fn pentagrid(gamma: [f64; 5]) -> Self {
        let g = Self::unit_directions(5);
        MultigridSpec::new(g.clone(), gamma.to_vec(), g).expect("pentagrid is well formed")
    }

    /// Pentagrid with γ_j drawn in (0.05, 0.95) from `seed`, redrawn until
    /// the spec validates.
    pub fn pentagrid_seeded(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let mut gamma = [0.0; 5];
            for x in gamma.iter_mut() {
                *x = rng.gen_range(0.05..0.95);
            }
            let spec = Self::pentagrid(gamma).with_seed(seed);
            if validate_spec(&spec).is_ok() {
                return spec;
            }
        }
    }

    /// G = {e1, e2}, g̃ = g.
    pub fn square_bigrid(gamma: [f64; 2]) -> Self {
        let g = vec![rvec(&[1.0, 0.0]), rvec(&[0.0, 1.0])];
        MultigridSpec::new(g.clone(), gamma.to_vec(), g).expect("bigrid is well formed")
    }

    /// Adds uniform offsets in (0, 1e-3) to every γ and validates the result.
    pub fn perturb(&self, seed: u64) -> Result<Self, MultigridError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = self.clone();
        for t in out.translations.iter_mut() {
            let mut e = 0.0;
            while e == 0.0 {
                e = rng.gen_range(0.0..1e-3);
            }
            *t += e;
        }
        out.seed = seed;
        validate_spec(&out)?;
        Ok(out)
    }

    pub fn from_doc(doc: &SpecDoc) -> Result<Self, MultigridError> {
        let n = doc.normals.len();
        let order: Vec<usize> = match &doc.ordering {
            Some(o) => {
                let mut s = o.clone();
                s.sort_unstable();
                if s != (0..n).collect::<Vec<_>>() {
                    return Err(MultigridError::InvalidSpec("ordering is not a permutation of the normals".into()));
                }
                o.clone()
            }
            None => (0..n).collect(),
        };
        if doc.normals.iter().any(|g| g.len() != doc.dimension) {
            return Err(MultigridError::InvalidSpec(format!("normals must have {} coordinates", doc.dimension)));
        }
        let translations = match (&doc.translations, doc.seed) {
            (Some(t), _) => t.clone(),
            (None, Some(seed)) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..n).map(|_| rng.gen_range(0.05..0.95)).collect()
            }
            (None, None) => return Err(MultigridError::InvalidSpec("either translations or seed is required".into())),
        };
        let edges = doc.primal_edges.clone().unwrap_or_else(|| doc.normals.clone());
        if translations.len() != n || edges.len() != n {
            return Err(MultigridError::InvalidSpec("normals, translations and primal edges differ in length".into()));
        }
        let spec = MultigridSpec::new(
            order.iter().map(|&i| rvec(&doc.normals[i])).collect(),
            order.iter().map(|&i| translations[i]).collect(),
            order.iter().map(|&i| rvec(&edges[i])).collect(),
        )?;
        Ok(spec.with_seed(doc.seed.unwrap_or(0)))
    }

    pub fn to_doc(&self) -> SpecDoc {
        SpecDoc {
            dimension: self.dim,
            normals: self.normals.iter().map(|v| v.iter().copied().collect()).collect(),
            translations: Some(self.translations.clone()),
            primal_edges: Some(self.edges.iter().map(|v| v.iter().copied().collect()).collect()),
            seed: Some(self.seed),
            ordering: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    pub fn normals(&self) -> &[RealVector] {
        &self.normals
    }

    pub fn translations(&self) -> &[f64] {
        &self.translations
    }

    pub fn edges(&self) -> &[RealVector] {
        &self.edges
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// t_g(x) = (⟨x, g/|g|⟩ − γ_g)/|g|; the hyperplanes of family g are t_g ∈ Z.
    #[inline]
    pub fn t(&self, g: usize, x: &RealVector) -> f64 {
        let n = &self.normals[g];
        let len = n.norm();
        (x.dot(n) / len - self.translations[g]) / len
    }

    /// All d-subsets in lexicographic order.
    pub fn subsets(&self) -> Vec<Vec<usize>> {
        (0..self.len()).combinations(self.dim).collect()
    }

    /// Position of J in `subsets()`.
    pub fn subset_index(&self, j: &[usize]) -> Option<usize> {
        self.subsets().iter().position(|s| s == j)
    }

    fn columns(vs: &[RealVector], idx: &[usize], normalize_by: Option<&[RealVector]>) -> DMatrix<f64> {
        let d = vs[0].len();
        DMatrix::from_fn(d, idx.len(), |r, c| {
            let i = idx[c];
            let s = normalize_by.map(|n| n[i].norm()).unwrap_or(1.0);
            vs[i][r] / s
        })
    }

    /// det of the columns g/|g|, g ∈ J.
    pub fn det_normals(&self, j: &[usize]) -> f64 {
        Self::columns(&self.normals, j, Some(&self.normals)).determinant()
    }

    /// det of the columns g̃/|g|, g ∈ J.
    pub fn det_edges(&self, j: &[usize]) -> f64 {
        Self::columns(&self.edges, j, Some(&self.normals)).determinant()
    }

    /// Volume of the tile spanned by g̃, g ∈ J.
    pub fn edges_volume(&self, j: &[usize]) -> f64 {
        Self::columns(&self.edges, j, None).determinant().abs()
    }

    /// Linear part of A: Σ g̃ gᵀ/|g|².
    pub fn linear_part(&self) -> DMatrix<f64> {
        let d = self.dim;
        let mut m = DMatrix::zeros(d, d);
        for (g, e) in self.normals.iter().zip(&self.edges) {
            m += e * g.transpose() / g.norm_squared();
        }
        m
    }
}

/// Per-subset solver for x(J, k): rows g/|g|² of N, x = N⁻¹(k + γ/|g|).
#[derive(Clone, Debug)]
pub(crate) struct SubsetFrame {
    pub j: Vec<usize>,
    pub inv: DMatrix<f64>,
    pub shift: RealVector,
}

impl SubsetFrame {
    pub fn new(spec: &MultigridSpec, j: &[usize]) -> Result<Self, MultigridError> {
        let d = spec.dim;
        let n = DMatrix::from_fn(d, d, |r, c| {
            let g = &spec.normals[j[r]];
            g[c] / g.norm_squared()
        });
        let inv = n.try_inverse().ok_or_else(|| MultigridError::SingularSubset(j.to_vec()))?;
        if inv.iter().any(|x| !x.is_finite()) || spec.det_normals(j).abs() < 1e-12 {
            return Err(MultigridError::SingularSubset(j.to_vec()));
        }
        let shift = RealVector::from_iterator(d, j.iter().map(|&g| spec.translations[g] / spec.normals[g].norm()));
        Ok(SubsetFrame { j: j.to_vec(), inv, shift })
    }

    #[inline]
    pub fn point(&self, k: &[i64]) -> RealVector {
        let v = RealVector::from_iterator(k.len(), k.iter().map(|&x| x as f64)) + &self.shift;
        &self.inv * v
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub subsets: usize,
    /// min over J of det(G_J)·det(G̃_J).
    pub min_det_product: f64,
    /// det(G·G̃ᵀ) with columns g/|g| and g̃/|g|.
    pub det_a: f64,
    /// Σ_J det(G_J)·det(G̃_J).
    pub cauchy_binet_sum: f64,
    pub probes: usize,
    /// Smallest distance from a probed dual point to a hyperplane not through it.
    pub min_probe_distance: f64,
}

/// (det(G·G̃ᵀ), Σ_J det(G_J)det(G̃_J)); equal by Cauchy–Binet.
pub fn cauchy_binet(spec: &MultigridSpec) -> (f64, f64) {
    let sum = spec.subsets().iter().map(|j| spec.det_normals(j) * spec.det_edges(j)).sum();
    (spec.linear_part().determinant(), sum)
}

fn probe(spec: &MultigridSpec, frame: &SubsetFrame, k: &[i64], min: &mut f64) -> Result<(), MultigridError> {
    let x = frame.point(k);
    for g in (0..spec.len()).filter(|g| !frame.j.contains(g)) {
        let t = spec.t(g, &x);
        let dist = (t - t.round()).abs() * spec.normals[g].norm();
        *min = min.min(dist);
        if dist < PROBE_TOL {
            return Err(MultigridError::DegenerateTranslations(format!(
                "dual point of J={:?} k={:?} is {dist:.3e} from a hyperplane of family {g}",
                frame.j, k
            )));
        }
    }
    Ok(())
}

/// Checks the compatibility condition on every d-subset, Cauchy–Binet, and
/// probes general position on a box |k| <= 2 around the origin of every Λ_J
/// plus 1000 seeded random (J, k) with |k| <= 50.
pub fn validate_spec(spec: &MultigridSpec) -> Result<ValidationReport, MultigridError> {
    let subsets = spec.subsets();
    let mut min_prod = f64::INFINITY;
    for j in &subsets {
        let p = spec.det_normals(j) * spec.det_edges(j);
        if !(p > 1e-12) {
            return Err(MultigridError::DetConditionViolated { subset: j.clone(), product: p });
        }
        min_prod = min_prod.min(p);
    }
    let (det_a, cb) = cauchy_binet(spec);
    let frames: Vec<SubsetFrame> = subsets.iter().map(|j| SubsetFrame::new(spec, j)).collect::<Result<_, _>>()?;
    let d = spec.dim;
    let mut min_dist = f64::INFINITY;
    let mut probes = 0;
    let r = 2i64;
    for f in &frames {
        for k in (0..d).map(|_| -r..=r).multi_cartesian_product() {
            probe(spec, f, &k, &mut min_dist)?;
            probes += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for _ in 0..1000 {
        let f = &frames[rng.gen_range(0..frames.len())];
        let k: Vec<i64> = (0..d).map(|_| rng.gen_range(-50..=50)).collect();
        probe(spec, f, &k, &mut min_dist)?;
        probes += 1;
    }
    if spec.len() == d {
        min_dist = f64::INFINITY;
    }
    Ok(ValidationReport { subsets: subsets.len(), min_det_product: min_prod, det_a, cauchy_binet_sum: cb, probes, min_probe_distance: min_dist })
}

/// A x = L x + b with L = Σ g̃ gᵀ/|g|², b = −Σ γ_g g̃/|g|, and the bound on
/// |tile center − A x| over all dual points.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    pub linear: DMatrix<f64>,
    pub offset: RealVector,
    pub bd_bound: f64,
}

impl AffineMap {
    /// Largest tile diameter over all subsets.
    pub fn max_tile_diameter(spec: &MultigridSpec) -> f64 {
        spec.subsets()
            .iter()
            .map(|j| Tile { j: j.clone(), k: vec![], anchor: RealVector::zeros(spec.dim()), generators: j.iter().map(|&g| spec.edges()[g].clone()).collect() }.diameter())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, x: &RealVector) -> RealVector {
        &self.linear * x + &self.offset
    }

    pub fn inverse_apply(&self, y: &RealVector) -> RealVector {
        let inv = self.linear.clone().try_inverse().expect("A is invertible after validation");
        inv * (y - &self.offset)
    }

    /// Operator norm of L⁻¹.
    pub fn inverse_norm(&self) -> f64 {
        let sv = self.linear.clone().singular_values();
        1.0 / sv.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn det(&self) -> f64 {
        self.linear.determinant()
    }
}

/// The affine map and max over J and J′ ⊆ G∖J of |Σ_{J′} g̃ + ½ Σ_J g̃|.
pub fn affine_map_and_bound(spec: &MultigridSpec) -> AffineMap {
    let d = spec.dim;
    let mut offset = RealVector::zeros(d);
    for ((g, e), gamma) in spec.normals.iter().zip(&spec.edges).zip(&spec.translations) {
        offset -= e * (gamma / g.norm());
    }
    let mut bound = 0.0f64;
    for j in spec.subsets() {
        let half: RealVector = j.iter().fold(RealVector::zeros(d), |a, &g| a + &spec.edges[g]) * 0.5;
        let rest: Vec<usize> = (0..spec.len()).filter(|g| !j.contains(g)).collect();
        for m in 0u64..(1u64 << rest.len()) {
            let mut s = half.clone();
            for (b, &g) in rest.iter().enumerate() {
                if m >> b & 1 == 1 {
                    s += &spec.edges[g];
                }
            }
            bound = bound.max(s.norm());
        }
    }
    AffineMap { linear: spec.linear_part(), offset, bd_bound: bound }
}

/// Lines of the multigrid in direction v, cut out by the families J′_v.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RailFamily {
    pub j_prime: Vec<usize>,
    /// Unit, orthogonal to g ∈ J′ with det(g_1, .., g_{d-1}, v) > 0.
    pub v: RealVector,
    /// Unit primal facet normal, orthogonal to g̃ ∈ J′ with the same orientation rule.
    pub v_tilde: RealVector,
    /// Area of a fundamental cell of the lines in v⊥: Π|g|²/|g_1 ∧ .. ∧ g_{d-1}|.
    pub cell_measure: f64,
    /// (d−1)-volume of the primal facet spanned by g̃, g ∈ J′.
    pub facet_area: f64,
}

impl RailFamily {
    /// Direction of the primal rail: the linear part of A applied to v.
    pub fn primal_direction(&self, spec: &MultigridSpec) -> RealVector {
        spec.linear_part() * &self.v
    }
}

/// One family per (d−1)-subset, in lexicographic order.
pub fn rail_families(spec: &MultigridSpec) -> Vec<RailFamily> {
    (0..spec.len())
        .combinations(spec.dim - 1)
        .map(|jp| {
            let gs: Vec<RealVector> = jp.iter().map(|&i| spec.normals[i].clone()).collect();
            let es: Vec<RealVector> = jp.iter().map(|&i| spec.edges[i].clone()).collect();
            let n = generalized_cross(&gs);
            let nt = generalized_cross(&es);
            let prod: f64 = gs.iter().map(|g| g.norm_squared()).product();
            RailFamily { cell_measure: prod / n.norm(), facet_area: nt.norm(), v: n.normalize(), v_tilde: nt.normalize(), j_prime: jp }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualLatticeInfo {
    pub j: Vec<usize>,
    /// Columns generate Λ_J − p_J; column i steps k_{J_i} by one.
    pub basis: DMatrix<f64>,
    pub base: RealVector,
    pub covolume: f64,
    pub density: f64,
    /// (rail index in `rail_families`, λ_{v,J}) for each rail of J.
    pub rail_generators: Vec<(usize, f64)>,
}

pub fn dual_lattice_info(spec: &MultigridSpec, j: &[usize]) -> Result<DualLatticeInfo, MultigridError> {
    if j.len() != spec.dim || j.windows(2).any(|w| w[0] >= w[1]) || j.iter().any(|&g| g >= spec.len()) {
        return Err(MultigridError::InvalidSpec(format!("{j:?} is not an ordered {}-subset", spec.dim)));
    }
    let f = SubsetFrame::new(spec, j)?;
    let base = f.point(&vec![0; spec.dim]);
    let covolume = f.inv.determinant().abs();
    let (det_a, _) = cauchy_binet(spec);
    let density = spec.det_normals(j) * spec.det_edges(j) / det_a;
    let rails = rail_families(spec);
    let mut gens = Vec::new();
    for (pos, w) in j.iter().enumerate() {
        let jp: Vec<usize> = j.iter().copied().filter(|g| g != w).collect();
        let idx = rails.iter().position(|r| r.j_prime == jp).expect("every (d-1)-subset has a rail");
        gens.push((idx, f.inv.column(pos).norm()));
    }
    gens.sort_by_key(|g| g.0);
    Ok(DualLatticeInfo { j: j.to_vec(), basis: f.inv, base, covolume, density, rail_generators: gens })
}

/// ρ_X = Σ_J 1/det Λ_J, the number of dual points per unit volume.
pub fn dual_density(spec: &MultigridSpec) -> f64 {
    spec.subsets()
        .iter()
        .map(|j| {
            let prod: f64 = j.iter().map(|&g| spec.normals[g].norm_squared()).product();
            let det = MultigridSpec::columns(&spec.normals, j, None).determinant().abs();
            det / prod
        })
        .sum()
}
