//! Bond energies of finite configurations in Z^d.
//!
//! In the crystal convention weights are V(v) <= 0 and missing bonds cost
//! -V(v). In the signed convention weights are surface costs directly: a
//! missing bond in direction v costs V(v), which may be negative.

mod recovery;
mod structure;

use std::collections::{BTreeMap, HashSet};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::anisotropy::{EvalMode, SupportFunction};
use crate::geom::{kernel_sublattice, BasisMatrix, ConvexPolytope, CosetFrame, IntVector, RealVector};

pub use recovery::{perimeter_bound, recovery_configuration, PerimeterBound, Recovery};
pub use structure::{pathology_configuration, pathology_potential, potential_structure, ProbeResult, StructureReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnergyError {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("channel direction {0} is not in the support of V")]
    ChannelNotInSupport(IntVector),
    #[error("direction must be nonzero")]
    ZeroDirection,
    #[error("map is singular")]
    SingularMap,
    #[error("{0} is not in the image lattice of the map")]
    NotInLattice(IntVector),
    #[error("N = {n} is below the feasibility threshold {threshold}")]
    InfeasibleCount { n: usize, threshold: usize },
    #[error("support spans a lattice of rank {rank} and covolume {det}, not Z^d")]
    SpanDeficient { rank: usize, det: f64 },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("operation requires the {0:?} convention")]
    WrongConvention(Convention),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    Crystal,
    Signed,
}

/// Finitely supported pair potential on lattice vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    dim: usize,
    atoms: BTreeMap<IntVector, f64>,
    convention: Convention,
    mode: EvalMode,
}

impl Potential {
    /// Zero weights are dropped from the support.
    pub fn new(
        atoms: impl IntoIterator<Item = (IntVector, f64)>,
        convention: Convention,
        mode: EvalMode,
    ) -> Result<Self, EnergyError> {
        let mut map = BTreeMap::new();
        let mut dim = None;
        for (v, w) in atoms {
            if !w.is_finite() {
                return Err(EnergyError::InvalidPotential(format!("non-finite weight at {v}")));
            }
            match dim {
                None => dim = Some(v.dim()),
                Some(d) if d != v.dim() => return Err(EnergyError::DimensionMismatch(d, v.dim())),
                _ => {}
            }
            if v.is_zero() {
                return Err(EnergyError::InvalidPotential("0 is in the support".into()));
            }
            if w != 0.0 {
                *map.entry(v).or_insert(0.0) += w;
            }
        }
        map.retain(|_, w| *w != 0.0);
        let dim = dim.ok_or_else(|| EnergyError::InvalidPotential("empty atom list".into()))?;
        if convention == Convention::Crystal {
            if map.values().any(|&w| w > 0.0) {
                return Err(EnergyError::InvalidPotential("crystal weights must be <= 0".into()));
            }
            if map.is_empty() {
                return Err(EnergyError::InvalidPotential("crystal potential needs a negative weight".into()));
            }
        }
        Ok(Potential { dim, atoms: map, convention, mode })
    }

    /// V ≡ w on {±e_i}.
    pub fn nearest_neighbor(d: usize, w: f64) -> Self {
        let atoms = (0..d).flat_map(|i| [(IntVector::unit(d, i), w), (IntVector::unit(d, i).scaled(-1), w)]);
        Potential::new(atoms, Convention::Crystal, EvalMode::PositivePart).expect("valid nearest-neighbor potential")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn mode(&self) -> EvalMode {
        self.mode
    }

    pub fn with_mode(&self, mode: EvalMode) -> Self {
        Potential { mode, ..self.clone() }
    }

    /// Support in lexicographic order with weights.
    pub fn atoms(&self) -> impl Iterator<Item = (&IntVector, f64)> {
        self.atoms.iter().map(|(v, w)| (v, *w))
    }

    pub fn support(&self) -> Vec<IntVector> {
        self.atoms.keys().cloned().collect()
    }

    pub fn weight(&self, v: &IntVector) -> f64 {
        self.atoms.get(v).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Cost of one missing bond in direction v.
    pub fn bond_cost(&self, v: &IntVector) -> f64 {
        match self.convention {
            Convention::Crystal => -self.weight(v),
            Convention::Signed => self.weight(v),
        }
    }

    /// C_E = Σ V(w).
    pub fn bulk_constant(&self) -> f64 {
        self.atoms.values().sum()
    }

    /// The anisotropy φ_V as a support function on the lattice L.
    pub fn support_function(&self, l: &BasisMatrix) -> SupportFunction {
        let (scale, sign) = match self.convention {
            Convention::Crystal => (1.0 / l.det().abs(), -1.0),
            Convention::Signed => (1.0, 1.0),
        };
        let atoms = self.atoms.iter().map(|(v, w)| (v.to_real(), sign * w * scale)).collect();
        SupportFunction::new(self.dim, atoms, self.mode)
    }
}

/// A finite set of lattice points, sorted lexicographically.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    dim: usize,
    points: Vec<IntVector>,
    lattice: BasisMatrix,
}

impl Configuration {
    /// Points in Z^d. Duplicates are merged.
    pub fn new(dim: usize, points: impl IntoIterator<Item = IntVector>) -> Self {
        let mut pts: Vec<IntVector> = points.into_iter().collect();
        assert!(pts.iter().all(|p| p.dim() == dim), "point dimension mismatch");
        pts.sort_unstable();
        pts.dedup();
        Configuration { dim, points: pts, lattice: BasisMatrix::identity(dim) }
    }

    /// Points required to lie in the integer lattice spanned by `lattice`.
    pub fn in_lattice(
        dim: usize,
        points: impl IntoIterator<Item = IntVector>,
        lattice: BasisMatrix,
    ) -> Result<Self, EnergyError> {
        let mut c = Configuration::new(dim, points);
        if let Some(cols) = lattice.int_columns() {
            let frame = CosetFrame::new(cols.to_vec()).map_err(|_| EnergyError::SingularMap)?;
            if let Some(p) = c.points.iter().find(|p| !frame.reduce(p).is_zero()) {
                return Err(EnergyError::NotInLattice(p.clone()));
            }
        }
        c.lattice = lattice;
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[IntVector] {
        &self.points
    }

    pub fn lattice(&self) -> &BasisMatrix {
        &self.lattice
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &IntVector) -> bool {
        self.points.binary_search(p).is_ok()
    }

    pub(crate) fn lookup(&self) -> HashSet<&[i64]> {
        self.points.iter().map(|p| p.0.as_slice()).collect()
    }

    /// One integer tuple per line, space separated.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for p in &self.points {
            let parts: Vec<String> = p.0.iter().map(|c| c.to_string()).collect();
            s.push_str(&parts.join(" "));
            s.push('\n');
        }
        s
    }
}

/// A translated sublattice τ + Λ_v together with the bond direction v.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SublatticeChannel {
    pub v: IntVector,
    pub tau: IntVector,
}

impl SublatticeChannel {
    /// All channels of direction v, one per coset of Λ_v, in lexicographic order of τ.
    pub fn all_for(v: &IntVector) -> Vec<SublatticeChannel> {
        let k = kernel_sublattice(v).expect("nonzero direction");
        k.frame().cell_points().into_iter().map(|tau| SublatticeChannel { v: v.clone(), tau }).collect()
    }
}

fn shifted(buf: &mut Vec<i64>, x: &IntVector, w: &IntVector) {
    buf.clear();
    buf.extend(x.0.iter().zip(&w.0).map(|(a, b)| a + b));
}

/// E(X) = Σ_x Σ_{x' ∈ X, x' != x} V(x' - x).
pub fn total_energy(x: &Configuration, v: &Potential) -> f64 {
    let set = x.lookup();
    let mut buf = Vec::with_capacity(x.dim());
    let mut e = 0.0;
    for p in x.points() {
        for (w, val) in v.atoms() {
            shifted(&mut buf, p, w);
            if set.contains(buf.as_slice()) {
                e += val;
            }
        }
    }
    e
}

/// Number of x in X with x + w not in X, for every w in the support.
pub fn missing_bonds(x: &Configuration, v: &Potential) -> BTreeMap<IntVector, u64> {
    let set = x.lookup();
    let mut buf = Vec::with_capacity(x.dim());
    let mut out: BTreeMap<IntVector, u64> = v.support().into_iter().map(|w| (w, 0)).collect();
    for p in x.points() {
        for (w, c) in out.iter_mut() {
            shifted(&mut buf, p, w);
            if !set.contains(buf.as_slice()) {
                *c += 1;
            }
        }
    }
    out
}

/// Surface energy: -Σ V(w)·#{x : x + w ∉ X} (crystal), Σ V(w)·#{...} (signed).
pub fn surface_energy(x: &Configuration, v: &Potential) -> f64 {
    missing_bonds(x, v).iter().map(|(w, &c)| v.bond_cost(w) * c as f64).sum()
}

/// Channel contribution: cost(v)·#{x ∈ (τ + Λ_v) ∩ X : x + v ∉ X}.
pub fn split_surface_energy(x: &Configuration, v: &Potential, channel: &SublatticeChannel) -> Result<f64, EnergyError> {
    let w = v.weight(&channel.v);
    if w == 0.0 {
        return Err(EnergyError::ChannelNotInSupport(channel.v.clone()));
    }
    let frame = kernel_sublattice(&channel.v).map_err(|_| EnergyError::ZeroDirection)?.frame();
    let set = x.lookup();
    let mut buf = Vec::with_capacity(x.dim());
    let mut count = 0u64;
    for p in x.points() {
        shifted(&mut buf, p, &channel.v);
        if !set.contains(buf.as_slice()) && frame.reduce(p) == channel.tau {
            count += 1;
        }
    }
    Ok(v.bond_cost(&channel.v) * count as f64)
}

/// φ_V(ν) on the lattice L.
pub fn phi_v(nu: &RealVector, v: &Potential, l: &BasisMatrix) -> Result<f64, EnergyError> {
    if nu.iter().all(|&c| c == 0.0) {
        return Err(EnergyError::ZeroDirection);
    }
    Ok(v.support_function(l).eval(nu))
}

/// P_V(E) = Σ_facets φ_V(n)·area.
pub fn perimeter_p_v(e: &ConvexPolytope, v: &Potential, l: &BasisMatrix) -> f64 {
    v.support_function(l).perimeter(e)
}

/// V^sym(v) = (V(v) + V(-v)) / 2 on N ∪ -N.
pub fn symmetrize(v: &Potential) -> Potential {
    let mut atoms: BTreeMap<IntVector, f64> = BTreeMap::new();
    for (w, val) in v.atoms() {
        *atoms.entry(w.clone()).or_insert(0.0) += 0.5 * val;
        *atoms.entry(-w).or_insert(0.0) += 0.5 * val;
    }
    Potential::new(atoms, v.convention(), v.mode()).expect("symmetrization keeps validity")
}

/// Integer matrix given by its columns.
pub fn int_matrix(cols: &[IntVector]) -> DMatrix<f64> {
    let d = cols.len();
    DMatrix::from_fn(d, d, |i, j| cols[j].0[i] as f64)
}

/// (V∘M, M⁻¹X) for an integer map M. Requires supp V and X inside M Z^d.
pub fn transform_by_map(
    v: &Potential,
    x: &Configuration,
    m: &BasisMatrix,
) -> Result<(Potential, Configuration), EnergyError> {
    let cols = m.int_columns().ok_or(EnergyError::SingularMap)?;
    if cols.len() != v.dim() || m.det() == 0.0 {
        return Err(EnergyError::SingularMap);
    }
    let frame = CosetFrame::new(cols.to_vec()).map_err(|_| EnergyError::SingularMap)?;
    let inv = int_matrix(cols).try_inverse().ok_or(EnergyError::SingularMap)?;
    let pull = |p: &IntVector| -> Result<IntVector, EnergyError> {
        if !frame.reduce(p).is_zero() {
            return Err(EnergyError::NotInLattice(p.clone()));
        }
        let y = &inv * p.to_real();
        Ok(IntVector(y.iter().map(|c| c.round() as i64).collect()))
    };
    let atoms = v.atoms().map(|(w, val)| pull(w).map(|u| (u, val))).collect::<Result<Vec<_>, _>>()?;
    let pts = x.points().iter().map(pull).collect::<Result<Vec<_>, _>>()?;
    Ok((Potential::new(atoms, v.convention(), v.mode())?, Configuration::new(x.dim(), pts)))
}

#[cfg(test)]
mod tests;
