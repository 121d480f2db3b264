//! JSON documents for potentials and multigrid specs, and the CSV tables
//! produced by the experiments. Every number is written with nine decimals.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::anisotropy::EvalMode;
use crate::geom::export::fmt_num;
use crate::geom::IntVector;
use crate::lattice_energy::{Convention, EnergyError, Potential};
use crate::multigrid::{MultigridError, MultigridSpec};
pub use crate::multigrid::SpecDoc;

fn default_mode() -> EvalMode {
    EvalMode::PositivePart
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomDoc {
    pub v: Vec<i64>,
    pub w: f64,
}

/// {"convention": "crystal"|"signed", "mode": "positive-part"|"absolute-value",
///  "symmetric": bool, "atoms": [{"v": [..], "w": ..}, ..]}.
/// With `symmetric`, every atom v also contributes −v with the same weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialDoc {
    pub convention: Convention,
    #[serde(default = "default_mode")]
    pub mode: EvalMode,
    #[serde(default)]
    pub symmetric: bool,
    pub atoms: Vec<AtomDoc>,
}

impl PotentialDoc {
    pub fn to_potential(&self) -> Result<Potential, EnergyError> {
        let mut atoms: Vec<(IntVector, f64)> = self.atoms.iter().map(|a| (IntVector::new(a.v.clone()), a.w)).collect();
        if self.symmetric {
            let neg: Vec<(IntVector, f64)> = atoms.iter().filter(|(v, _)| !v.is_zero()).map(|(v, w)| (v.scaled(-1), *w)).collect();
            atoms.extend(neg);
        }
        Potential::new(atoms, self.convention, self.mode)
    }

    pub fn from_potential(p: &Potential) -> Self {
        PotentialDoc {
            convention: p.convention(),
            mode: p.mode(),
            symmetric: false,
            atoms: p.atoms().map(|(v, w)| AtomDoc { v: v.0.clone(), w }).collect(),
        }
    }
}

pub fn spec_from_doc(doc: &SpecDoc) -> Result<MultigridSpec, MultigridError> {
    MultigridSpec::from_doc(doc)
}

/// One row of a convergence table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub rescaled_energy: f64,
    pub target: f64,
    pub rel_err: f64,
}

impl ConvergenceRow {
    pub fn new(n: usize, rescaled_energy: f64, target: f64) -> Self {
        let rel_err = if target != 0.0 { (rescaled_energy - target).abs() / target.abs() } else { rescaled_energy.abs() };
        ConvergenceRow { n, rescaled_energy, target, rel_err }
    }
}

pub const CONVERGENCE_HEADER: &str = "N,rescaled_energy,target,rel_err";

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut s = format!("{CONVERGENCE_HEADER}\n");
    for r in rows {
        writeln!(s, "{},{},{},{}", r.n, fmt_num(r.rescaled_energy), fmt_num(r.target), fmt_num(r.rel_err)).unwrap();
    }
    s
}

/// Generic CSV: header line, then rows of preformatted cells.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_doc_round_trip() {
        let text = r#"{"convention":"crystal","symmetric":true,"atoms":[{"v":[1,0],"w":-1},{"v":[0,1],"w":-1}]}"#;
        let doc: PotentialDoc = serde_json::from_str(text).unwrap();
        let p = doc.to_potential().unwrap();
        assert_eq!(p, Potential::nearest_neighbor(2, -1.0));
        let back = PotentialDoc::from_potential(&p).to_potential().unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<PotentialDoc>(r#"{"convention":"crystal","atoms":[],"extra":1}"#).is_err());
        let bad: PotentialDoc = serde_json::from_str(r#"{"convention":"crystal","atoms":[{"v":[1,0],"w":1}]}"#).unwrap();
        assert!(bad.to_potential().is_err());
    }

    #[test]
    fn convergence_table_format() {
        let csv = convergence_csv(&[ConvergenceRow::new(100, 4.0, 4.0), ConvergenceRow::new(400, 4.5, 4.0)]);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CONVERGENCE_HEADER));
        assert_eq!(lines.next(), Some("100,4.000000000,4.000000000,0.000000000"));
        assert_eq!(lines.next(), Some("400,4.500000000,4.000000000,0.125000000"));
    }

    #[test]
    fn spec_doc_from_json() {
        let text = r#"{"dimension":2,"normals":[[1,0],[0,1]],"translations":[0.25,0.25]}"#;
        let s = spec_from_doc(&serde_json::from_str(text).unwrap()).unwrap();
        assert_eq!(s, MultigridSpec::square_bigrid([0.25, 0.25]));
    }
}
