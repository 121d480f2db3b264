//! Piecewise-linear support functions φ(ν) = Σ w ⟨v, ν⟩₊ or Σ w |⟨v, ν⟩|.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::geom::{polytope_measure, ConvexPolytope, RealVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalMode {
    PositivePart,
    AbsoluteValue,
}

impl EvalMode {
    #[inline]
    pub fn apply(self, t: f64) -> f64 {
        match self {
            EvalMode::PositivePart => t.max(0.0),
            EvalMode::AbsoluteValue => t.abs(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupportFunction {
    pub dim: usize,
    pub atoms: Vec<(RealVector, f64)>,
    pub mode: EvalMode,
}

impl SupportFunction {
    pub fn new(dim: usize, atoms: Vec<(RealVector, f64)>, mode: EvalMode) -> Self {
        assert!(atoms.iter().all(|(v, _)| v.len() == dim), "atom dimension mismatch");
        SupportFunction { dim, atoms, mode }
    }

    pub fn eval(&self, nu: &RealVector) -> f64 {
        self.atoms.iter().map(|(v, w)| w * self.mode.apply(v.dot(nu))).sum()
    }

    /// Σ over facets of φ(normal) times facet area.
    pub fn perimeter(&self, e: &ConvexPolytope) -> f64 {
        polytope_measure(e).facets.iter().map(|(n, a)| self.eval(n) * a).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        SupportFunction { dim: self.dim, atoms: self.atoms.iter().map(|(v, w)| (v.clone(), w * s)).collect(), mode: self.mode }
    }

    /// Same function in positive-part form: |t| = t₊ + (-t)₊.
    pub fn to_positive_part(&self) -> Self {
        match self.mode {
            EvalMode::PositivePart => self.clone(),
            EvalMode::AbsoluteValue => SupportFunction {
                dim: self.dim,
                atoms: self.atoms.iter().flat_map(|(v, w)| [(v.clone(), *w), (-v, *w)]).collect(),
                mode: EvalMode::PositivePart,
            },
        }
    }

    /// Pointwise sum; modes are reconciled through the positive-part form.
    pub fn sum(&self, other: &SupportFunction) -> Self {
        assert_eq!(self.dim, other.dim);
        if self.mode == other.mode {
            let mut atoms = self.atoms.clone();
            atoms.extend(other.atoms.iter().cloned());
            return SupportFunction { dim: self.dim, atoms, mode: self.mode };
        }
        self.to_positive_part().sum(&other.to_positive_part())
    }

    /// (positive weights, absolute values of negative weights).
    pub fn split_signs(&self) -> (SupportFunction, SupportFunction) {
        let pos = self.atoms.iter().filter(|(_, w)| *w > 0.0).cloned().collect();
        let neg = self.atoms.iter().filter(|(_, w)| *w < 0.0).map(|(v, w)| (v.clone(), -w)).collect();
        (SupportFunction::new(self.dim, pos, self.mode), SupportFunction::new(self.dim, neg, self.mode))
    }

    /// φ∘M in the sense of potentials: atoms v become M⁻¹v.
    pub fn pullback(&self, m: &DMatrix<f64>) -> Option<Self> {
        let inv = m.clone().try_inverse()?;
        Some(SupportFunction {
            dim: self.dim,
            atoms: self.atoms.iter().map(|(v, w)| (&inv * v, *w)).collect(),
            mode: self.mode,
        })
    }

    pub fn has_mixed_signs(&self) -> bool {
        self.atoms.iter().any(|(_, w)| *w > 0.0) && self.atoms.iter().any(|(_, w)| *w < 0.0)
    }
}
