//! Surface energies of finite unions of multigrid tiles, counted on primal
//! facets or on cut nearest-neighbour pairs of dual points, and the limit
//! anisotropy φ_W.

mod audit;
mod recovery;

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::anisotropy::{EvalMode, SupportFunction};
use crate::geom::{ConvexPolytope, RealVector};
use crate::multigrid::{affine_map_and_bound, rail_families, DualPoint, MultigridError, MultigridSpec, RailFamily};

pub use audit::{density_audit, ClassFraction, DensityAudit, SubsetDensity};
pub use recovery::{qc_convergence, qc_recovery, recovery_threshold, symmetric_difference, QcRecovery, QcRow};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QcError {
    #[error("no weight for facet normal {0:?}")]
    MissingNormal(Vec<f64>),
    #[error("weights must be finite and nonnegative, got {0}")]
    InvalidWeight(f64),
    #[error("invalid subset: {0}")]
    InvalidSubset(String),
    #[error("zero direction")]
    ZeroDirection,
    #[error("N = {n} is below the feasibility threshold {threshold:.3}")]
    InfeasibleCount { n: usize, threshold: f64 },
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("dual point {0:?} occurs twice")]
    DuplicatePoint((Vec<usize>, Vec<i64>)),
    #[error(transparent)]
    Multigrid(#[from] MultigridError),
}

/// (J, k_J); identifies a dual point.
pub type DualKey = (Vec<usize>, Vec<i64>);

/// Weight w(±ṽ) of primal facets by normal class. Normals are matched up to
/// sign within 1e-9; `default` covers classes not listed.
#[derive(Clone, Debug, PartialEq)]
pub struct TileWeight {
    pub default: Option<f64>,
    pub by_normal: Vec<(RealVector, f64)>,
}

impl TileWeight {
    pub fn uniform(w: f64) -> Self {
        TileWeight { default: Some(w), by_normal: Vec::new() }
    }

    pub fn with(mut self, normal: RealVector, w: f64) -> Self {
        self.by_normal.push((normal, w));
        self
    }

    pub fn get(&self, n: &RealVector) -> Option<f64> {
        let u = n.normalize();
        self.by_normal
            .iter()
            .find(|(m, _)| {
                let m = m.normalize();
                (&m - &u).norm() < 1e-9 || (&m + &u).norm() < 1e-9
            })
            .map(|(_, w)| *w)
            .or(self.default)
    }
}

/// W(v) = w(ṽ)·|∧ g̃, g ∈ J′_v| per rail family, in `rail_families` order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RailPotential {
    pub rails: Vec<RailFamily>,
    pub weights: Vec<f64>,
}

impl RailPotential {
    pub fn rail_of(&self, j_prime: &[usize]) -> Option<usize> {
        self.rails.iter().position(|r| r.j_prime == j_prime)
    }
}

pub fn rail_weights(spec: &MultigridSpec, w: &TileWeight) -> Result<RailPotential, QcError> {
    let rails = rail_families(spec);
    let mut weights = Vec::with_capacity(rails.len());
    for r in &rails {
        let x = w.get(&r.v_tilde).ok_or_else(|| QcError::MissingNormal(r.v_tilde.iter().copied().collect()))?;
        if !(x.is_finite() && x >= 0.0) {
            return Err(QcError::InvalidWeight(x));
        }
        weights.push(x * r.facet_area);
    }
    Ok(RailPotential { rails, weights })
}

/// A finite set of distinct dual points (equivalently tiles).
#[derive(Clone, Debug, Default)]
pub struct TileSet {
    points: Vec<DualPoint>,
    keys: HashSet<DualKey>,
}

impl TileSet {
    pub fn new(points: Vec<DualPoint>) -> Result<Self, QcError> {
        let mut keys = HashSet::with_capacity(points.len());
        for p in &points {
            if !keys.insert(p.key()) {
                return Err(QcError::DuplicatePoint(p.key()));
            }
        }
        Ok(TileSet { points, keys })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[DualPoint] {
        &self.points
    }

    pub fn contains_key(&self, key: &DualKey) -> bool {
        self.keys.contains(key)
    }

    pub fn contains(&self, p: &DualPoint) -> bool {
        self.keys.contains(&p.key())
    }

    /// X ∩ Λ_J.
    pub fn slice(&self, j: &[usize]) -> Vec<&DualPoint> {
        self.points.iter().filter(|p| p.j == j).collect()
    }

    /// Line-delimited {"J":[..],"k":[..]} records.
    pub fn to_records(&self) -> String {
        let mut s = String::new();
        for p in &self.points {
            let j: Vec<String> = p.j.iter().map(|x| x.to_string()).collect();
            let k: Vec<String> = p.k_j().iter().map(|x| x.to_string()).collect();
            s.push_str(&format!("{{\"J\":[{}],\"k\":[{}]}}\n", j.join(","), k.join(",")));
        }
        s
    }
}

const TIE_TOL: f64 = 1e-9;

/// The next dual point after `p` on its multigrid line of the rail with
/// families `j_prime` ⊂ p.J, moving along +v (`forward`) or −v.
pub fn rail_neighbor(spec: &MultigridSpec, p: &DualPoint, rail: &RailFamily, forward: bool) -> Result<DualPoint, QcError> {
    let dir = if forward { rail.v.clone() } else { -&rail.v };
    let mut best: Option<(f64, usize, i64)> = None;
    let mut second = f64::INFINITY;
    for (g, n) in spec.normals().iter().enumerate() {
        if rail.j_prime.contains(&g) {
            continue;
        }
        let rate = dir.dot(n) / n.norm_squared();
        if rate.abs() < 1e-15 {
            continue;
        }
        let t = spec.t(g, &p.x);
        let target = if p.j.contains(&g) {
            if rate > 0.0 {
                p.k[g] + 1
            } else {
                p.k[g] - 1
            }
        } else if rate > 0.0 {
            p.k[g] + 1
        } else {
            p.k[g]
        };
        let s = (target as f64 - t) / rate;
        match best {
            Some((b, _, _)) if s >= b => second = second.min(s),
            _ => {
                if let Some((b, _, _)) = best {
                    second = second.min(b);
                }
                best = Some((s, g, target));
            }
        }
    }
    let (s, g, target) = best.ok_or_else(|| QcError::InvalidSubset("rail line meets no other family".into()))?;
    if second - s < TIE_TOL {
        return Err(MultigridError::GenericityViolation { j: p.j.clone(), k: p.k_j(), g }.into());
    }
    let mut j: Vec<usize> = rail.j_prime.clone();
    j.push(g);
    j.sort_unstable();
    let kj: Vec<i64> = j.iter().map(|&h| if h == g { target } else { p.k[h] }).collect();
    Ok(spec.dual_point(&j, &kj)?)
}

/// The d rails through a dual point: J minus one family each.
fn rails_of<'a>(pot: &'a RailPotential, j: &[usize]) -> Vec<(usize, &'a RailFamily)> {
    j.iter()
        .map(|w| {
            let jp: Vec<usize> = j.iter().copied().filter(|g| g != w).collect();
            let idx = pot.rail_of(&jp).expect("every (d-1)-subset has a rail");
            (idx, &pot.rails[idx])
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TileEnergy {
    /// Σ_v W(v)·#{boundary facets with normal ±ṽ}.
    pub primal: f64,
    /// Σ_v W(v)·#{cut consecutive pairs along v}.
    pub dual: f64,
    /// Boundary facets with exterior normal +ṽ only; half of `primal` for
    /// every finite union.
    pub oriented: f64,
    /// Boundary facet counts per rail (both orientations).
    pub facets: Vec<usize>,
    /// Cut pairs per rail.
    pub pairs: Vec<usize>,
}

/// Facet key: (J′, lifted base corner in Z^G).
type FacetKey = (Vec<usize>, Vec<i64>);

fn boundary_facets(spec: &MultigridSpec, x: &TileSet, pot: &RailPotential) -> (Vec<usize>, Vec<usize>) {
    let n = spec.len();
    let mut seen: HashMap<FacetKey, (usize, bool)> = HashMap::new();
    for p in x.points() {
        // lifted anchor: k_g for g ∈ J, k_g + 1 otherwise
        let base: Vec<i64> = (0..n).map(|g| if p.j.contains(&g) { p.k[g] } else { p.k[g] + 1 }).collect();
        for &w in &p.j {
            let jp: Vec<usize> = p.j.iter().copied().filter(|&g| g != w).collect();
            let rail = &pot.rails[pot.rail_of(&jp).expect("rail exists")];
            // exterior normal of the facet at s = 1 is +ṽ iff g̃_w points along ṽ
            let outward_plus = spec.edges()[w].dot(&rail.v_tilde) > 0.0;
            for s in 0..2i64 {
                let mut b = base.clone();
                b[w] += s;
                let e = seen.entry((jp.clone(), b)).or_insert((0, false));
                e.0 += 1;
                e.1 = (s == 1) == outward_plus;
            }
        }
    }
    let mut all = vec![0usize; pot.rails.len()];
    let mut plus = vec![0usize; pot.rails.len()];
    for ((jp, _), (count, is_plus)) in seen {
        if count == 1 {
            let r = pot.rail_of(&jp).expect("rail exists");
            all[r] += 1;
            plus[r] += is_plus as usize;
        }
    }
    (all, plus)
}

/// Cut pairs per rail: neighbours y ∉ X of points x ∈ X, both directions.
fn cut_pairs(spec: &MultigridSpec, x: &TileSet, pot: &RailPotential) -> Result<Vec<usize>, QcError> {
    let mut counts = vec![0usize; pot.rails.len()];
    for p in x.points() {
        for (idx, rail) in rails_of(pot, &p.j) {
            for fwd in [true, false] {
                let y = rail_neighbor(spec, p, rail, fwd)?;
                if !x.contains(&y) {
                    counts[idx] += 1;
                }
            }
        }
    }
    Ok(counts)
}

/// Primal facet count and dual pair count of the tile union.
pub fn tile_energy(spec: &MultigridSpec, x: &TileSet, pot: &RailPotential) -> Result<TileEnergy, QcError> {
    let (facets, plus) = boundary_facets(spec, x, pot);
    let pairs = cut_pairs(spec, x, pot)?;
    let weigh = |c: &[usize]| c.iter().zip(&pot.weights).map(|(&n, w)| n as f64 * w).sum::<f64>();
    Ok(TileEnergy { primal: weigh(&facets), dual: weigh(&pairs), oriented: weigh(&plus), facets, pairs })
}

fn check_rail(pot: &RailPotential, rail: usize) -> Result<&RailFamily, QcError> {
    pot.rails.get(rail).ok_or_else(|| QcError::InvalidSubset(format!("no rail {rail}")))
}

/// EP_v(X) (j = None): consecutive pairs on lines of the rail with exactly
/// one endpoint in X. EP_{J,v}(X ∩ Λ_J) (j = Some(J), J ⊇ J′_v): pairs in
/// Λ_J one generator λ_{v,J} v apart with exactly one endpoint in X ∩ Λ_J.
pub fn ep_counts(spec: &MultigridSpec, x: &TileSet, pot: &RailPotential, rail: usize, j: Option<&[usize]>) -> Result<usize, QcError> {
    let r = check_rail(pot, rail)?;
    match j {
        None => {
            let mut n = 0;
            for p in x.points().iter().filter(|p| r.j_prime.iter().all(|g| p.j.contains(g))) {
                for fwd in [true, false] {
                    n += !x.contains(&rail_neighbor(spec, p, r, fwd)?) as usize;
                }
            }
            Ok(n)
        }
        Some(j) => {
            let w = ep_subset_family(spec, r, j)?;
            let pos = j.iter().position(|&g| g == w).unwrap();
            let mut n = 0;
            for p in x.points().iter().filter(|p| p.j == j) {
                let kj = p.k_j();
                for step in [-1i64, 1] {
                    let mut k = kj.clone();
                    k[pos] += step;
                    n += !x.contains_key(&(j.to_vec(), k)) as usize;
                }
            }
            Ok(n)
        }
    }
}

/// The family w with J = J′ ∪ {w}.
fn ep_subset_family(spec: &MultigridSpec, r: &RailFamily, j: &[usize]) -> Result<usize, QcError> {
    if j.len() != spec.dim() || j.windows(2).any(|w| w[0] >= w[1]) || j.iter().any(|&g| g >= spec.len()) {
        return Err(QcError::InvalidSubset(format!("{j:?} is not an ordered {}-subset", spec.dim())));
    }
    if !r.j_prime.iter().all(|g| j.contains(g)) {
        return Err(QcError::InvalidSubset(format!("{j:?} does not contain {:?}", r.j_prime)));
    }
    Ok(*j.iter().find(|g| !r.j_prime.contains(g)).unwrap())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BondCount {
    pub rail: usize,
    /// Σ_{J ⊇ J′_v} EP_{J,v}(X ∩ Λ_J).
    pub lhs: usize,
    pub ep_v: usize,
    /// (#G − d + 1)·EP_v(X).
    pub rhs: usize,
    pub holds: bool,
    /// Every EP_{J,v} pair has a cut consecutive pair between its endpoints.
    pub surjective: bool,
}

/// Compares both sides of the bond-counting inequality for one rail and
/// walks each Λ_J pair along its line to find a cut consecutive pair.
pub fn bond_count(spec: &MultigridSpec, x: &TileSet, pot: &RailPotential, rail: usize) -> Result<BondCount, QcError> {
    let r = check_rail(pot, rail)?;
    let ep_v = ep_counts(spec, x, pot, rail, None)?;
    let mut lhs = 0;
    let mut surjective = true;
    for w in (0..spec.len()).filter(|g| !r.j_prime.contains(g)) {
        let mut j = r.j_prime.clone();
        j.push(w);
        j.sort_unstable();
        lhs += ep_counts(spec, x, pot, rail, Some(&j))?;
        let pos = j.iter().position(|&g| g == w).unwrap();
        for p in x.points().iter().filter(|p| p.j == j) {
            for step in [-1i64, 1] {
                let mut k = p.k_j();
                k[pos] += step;
                let target = (j.clone(), k);
                if x.contains_key(&target) {
                    continue;
                }
                // direction of increasing k_w along v
                let fwd = (r.v.dot(&spec.normals()[w]) > 0.0) == (step > 0);
                let mut cur = p.clone();
                let mut found = false;
                let mut reached = false;
                for _ in 0..10_000 {
                    let next = rail_neighbor(spec, &cur, r, fwd)?;
                    found |= x.contains(&cur) != x.contains(&next);
                    if next.key() == target {
                        reached = true;
                        break;
                    }
                    cur = next;
                }
                surjective &= found && reached;
            }
        }
    }
    let rhs = (spec.len() - spec.dim() + 1) * ep_v;
    Ok(BondCount { rail, lhs, ep_v, rhs, holds: lhs <= rhs, surjective })
}

/// φ_W as a support function: (1/det A) Σ_v (W(v)/H(U_v)) ⟨·, L v⟩₊.
pub fn phi_w_function(spec: &MultigridSpec, pot: &RailPotential) -> SupportFunction {
    let a = affine_map_and_bound(spec);
    let det = a.det();
    let atoms = pot.rails.iter().zip(&pot.weights).map(|(r, w)| (&a.linear * &r.v, w / (r.cell_measure * det))).collect();
    SupportFunction::new(spec.dim(), atoms, EvalMode::PositivePart)
}

pub fn phi_w_eval(nu: &RealVector, spec: &MultigridSpec, pot: &RailPotential) -> Result<f64, QcError> {
    if nu.norm() == 0.0 {
        return Err(QcError::ZeroDirection);
    }
    Ok(phi_w_function(spec, pot).eval(nu))
}

/// ∫_{∂E} φ_W(ν) dH^{d-1} over the facets of E.
pub fn perimeter_p_w(e: &ConvexPolytope, spec: &MultigridSpec, pot: &RailPotential) -> f64 {
    phi_w_function(spec, pot).perimeter(e)
}

/// A connected set of `n` dual points grown from the dual point nearest
/// `start` by adding random rail neighbours of the current set.
pub fn grow_cluster(spec: &MultigridSpec, start: &DualPoint, n: usize, seed: u64) -> Result<TileSet, QcError> {
    let pot = RailPotential { rails: rail_families(spec), weights: vec![] };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![start.clone()];
    let mut keys: HashSet<DualKey> = HashSet::from([start.key()]);
    let mut frontier: Vec<DualPoint> = Vec::new();
    let mut frontier_keys: HashSet<DualKey> = HashSet::new();
    let mut push_neighbors = |p: &DualPoint, keys: &HashSet<DualKey>, frontier: &mut Vec<DualPoint>| -> Result<(), QcError> {
        for (_, rail) in rails_of(&pot, &p.j) {
            for fwd in [true, false] {
                let y = rail_neighbor(spec, p, rail, fwd)?;
                if !keys.contains(&y.key()) && frontier_keys.insert(y.key()) {
                    frontier.push(y);
                }
            }
        }
        Ok(())
    };
    push_neighbors(start, &keys, &mut frontier)?;
    while points.len() < n && !frontier.is_empty() {
        let i = rng.gen_range(0..frontier.len());
        let p = frontier.swap_remove(i);
        if keys.insert(p.key()) {
            push_neighbors(&p, &keys, &mut frontier)?;
            points.push(p);
        }
    }
    TileSet::new(points)
}
