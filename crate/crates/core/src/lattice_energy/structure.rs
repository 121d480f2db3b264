//! Structural checks on signed potentials: span, N₊-connectedness of
//! N₋ ∪ {0}, path constants and the stability inequality on probes.

use std::collections::{BTreeMap, HashMap, VecDeque};

use super::{missing_bonds, Configuration, Convention, EnergyError, Potential};
use crate::anisotropy::EvalMode;
use crate::geom::{lattice_reduce, IntVector};

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeResult {
    pub size: usize,
    /// F_V(X) with the potential's own sign convention.
    pub f_v: f64,
    /// F for the indicator potential 1_N.
    pub f_indicator: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructureReport {
    pub span_rank: usize,
    pub span_det: f64,
    pub spans_lattice: bool,
    /// N₋ ∪ {0} reachable from 0 by N₊-steps.
    pub connected: bool,
    pub unreachable: Vec<IntVector>,
    /// Chosen N₊-path (as a list of steps) for every u in N₋.
    pub paths: BTreeMap<IntVector, Vec<IntVector>>,
    /// max over steps s in N₊ of the number of occurrences of s across all paths.
    pub c1: Option<f64>,
    /// C₁ · inf V₊.
    pub c_v_nominal: Option<f64>,
    /// Smallest C for which C V₊ − V₋ satisfies the stability inequality with
    /// ε = 1 by the path argument: C₁ (1 + max V₋) / inf V₊.
    pub c_v_sufficient: Option<f64>,
    /// ε certified for V itself by the path argument, when positive.
    pub epsilon_certified: Option<f64>,
    pub epsilon_tested: f64,
    pub probes: Vec<ProbeResult>,
}

/// Signed potential with weight c on {(±1,±1)} and −1 on {±e1, ±e2}.
pub fn pathology_potential(c: f64) -> Potential {
    let mut atoms = Vec::new();
    for s1 in [-1, 1] {
        for s2 in [-1, 1] {
            atoms.push((IntVector(vec![s1, s2]), c));
        }
    }
    for i in 0..2 {
        atoms.push((IntVector::unit(2, i), -1.0));
        atoms.push((IntVector::unit(2, i).scaled(-1), -1.0));
    }
    Potential::new(atoms, Convention::Signed, EvalMode::PositivePart).expect("valid signed potential")
}

/// Points of the even sublattice inside the diamond |x1| + |x2| <= sqrt(N):
/// a square of side sqrt(2N) with edges along (1,±1), holding about N points.
pub fn pathology_configuration(n: usize) -> Configuration {
    let r = (n as f64).sqrt();
    let ri = r.floor() as i64;
    let mut pts = Vec::new();
    for x in -ri..=ri {
        let rem = ri - x.abs();
        for y in -rem..=rem {
            if (x + y).rem_euclid(2) == 0 && ((x.abs() + y.abs()) as f64) <= r + 1e-12 {
                pts.push(IntVector(vec![x, y]));
            }
        }
    }
    Configuration::new(2, pts)
}

/// Breadth-first N₊-paths from 0 inside a box, returning the step list to
/// each reachable target.
fn bfs_paths(steps: &[IntVector], targets: &[IntVector], radius: i64) -> BTreeMap<IntVector, Vec<IntVector>> {
    let d = steps.first().map_or(0, |s| s.dim());
    let origin = IntVector::zeros(d);
    let mut parent: HashMap<IntVector, (IntVector, usize)> = HashMap::new();
    let mut queue = VecDeque::from([origin.clone()]);
    let mut seen = std::collections::HashSet::from([origin.clone()]);
    let mut remaining: std::collections::BTreeSet<&IntVector> = targets.iter().collect();
    remaining.remove(&origin);
    while let Some(x) = queue.pop_front() {
        if remaining.is_empty() {
            break;
        }
        for (i, s) in steps.iter().enumerate() {
            let y = &x + s;
            if y.max_abs() > radius || seen.contains(&y) {
                continue;
            }
            seen.insert(y.clone());
            parent.insert(y.clone(), (x.clone(), i));
            remaining.remove(&y);
            queue.push_back(y);
        }
    }
    let mut out = BTreeMap::new();
    for t in targets {
        if t.is_zero() {
            out.insert(t.clone(), Vec::new());
            continue;
        }
        if !parent.contains_key(t) {
            continue;
        }
        let mut path = Vec::new();
        let mut cur = t.clone();
        while let Some((p, i)) = parent.get(&cur) {
            path.push(steps[*i].clone());
            cur = p.clone();
        }
        path.reverse();
        out.insert(t.clone(), path);
    }
    out
}

/// Span, connectedness, path constants and the inequality F_V ≥ ε F_{1_N}
/// on each probe.
pub fn potential_structure(v: &Potential, probes: &[Configuration], epsilon: f64) -> Result<StructureReport, EnergyError> {
    if v.convention() != Convention::Signed {
        return Err(EnergyError::WrongConvention(Convention::Signed));
    }
    let support = v.support();
    let red = lattice_reduce(&support);
    let spans = red.rank == v.dim() && (red.det - 1.0).abs() < 1e-9;
    let plus: Vec<IntVector> = v.atoms().filter(|(_, w)| *w > 0.0).map(|(u, _)| u.clone()).collect();
    let minus: Vec<IntVector> = v.atoms().filter(|(_, w)| *w < 0.0).map(|(u, _)| u.clone()).collect();
    let inf_plus = v.atoms().filter(|(_, w)| *w > 0.0).map(|(_, w)| w).fold(f64::INFINITY, f64::min);
    let max_minus = v.atoms().filter(|(_, w)| *w < 0.0).map(|(_, w)| -w).fold(0.0, f64::max);

    let radius = 3 * support.iter().map(|u| u.max_abs()).max().unwrap_or(1).max(1);
    let paths = if plus.is_empty() { BTreeMap::new() } else { bfs_paths(&plus, &minus, radius) };
    let unreachable: Vec<IntVector> = minus.iter().filter(|u| !paths.contains_key(*u)).cloned().collect();
    let connected = !plus.is_empty() && unreachable.is_empty();

    let (c1, c_v_nominal, c_v_sufficient, eps_cert) = if connected {
        // every v in N₊ is its own one-step path
        let mut count: BTreeMap<&IntVector, f64> = plus.iter().map(|s| (s, 1.0)).collect();
        for p in paths.values() {
            for s in p {
                *count.get_mut(s).expect("step in N₊") += 1.0;
            }
        }
        let c1 = count.values().copied().fold(0.0, f64::max);
        let eps = (inf_plus - c1 * max_minus) / c1;
        (
            Some(c1),
            Some(c1 * inf_plus),
            Some(c1 * (1.0 + max_minus) / inf_plus),
            (eps > 0.0).then_some(eps),
        )
    } else {
        (None, None, None, None)
    };

    let indicator = Potential::new(support.iter().map(|u| (u.clone(), 1.0)), Convention::Signed, v.mode())?;
    let probes = probes
        .iter()
        .map(|x| {
            let f_v = super::surface_energy(x, v);
            let f_indicator: f64 = missing_bonds(x, &indicator).values().map(|&c| c as f64).sum();
            ProbeResult { size: x.len(), f_v, f_indicator, holds: f_v >= epsilon * f_indicator - 1e-9 }
        })
        .collect();

    Ok(StructureReport {
        span_rank: red.rank,
        span_det: red.det,
        spans_lattice: spans,
        connected,
        unreachable,
        paths,
        c1,
        c_v_nominal,
        c_v_sufficient,
        epsilon_certified: eps_cert,
        epsilon_tested: epsilon,
        probes,
    })
}
