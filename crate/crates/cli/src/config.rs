//! Scenario documents and the input documents they reference.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use wulffgrid::geom::shapes::{centered_cube, regular_polygon, unit_cube};
use wulffgrid::geom::{convex_hull, polytope_measure, rvec};
use wulffgrid::io::{PotentialDoc, SpecDoc};
use wulffgrid::{ConvexPolytope, MultigridSpec, Potential, TileWeight};

use crate::CliError;

pub const SCENARIO_VERSION: u32 = 1;

fn join_path(prefix: &str, inner: &str) -> String {
    match (prefix.is_empty(), inner == "." || inner.is_empty()) {
        (_, true) => prefix.to_string(),
        (true, false) => inner.to_string(),
        (false, false) => format!("{prefix}.{inner}"),
    }
}

/// Deserializes `value`, reporting failures with the dotted field path
/// below `prefix`.
pub fn parse_at<T: DeserializeOwned>(value: &Value, prefix: &str) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value.clone()).map_err(|e| {
        let path = join_path(prefix, &e.path().to_string());
        CliError::config(path, e.into_inner().to_string())
    })
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::config(path.display().to_string(), e.to_string()))
}

/// Inline document, or a string naming a JSON file relative to `base`.
fn resolve(value: &Value, base: &Path, path: &str) -> Result<(Value, String), CliError> {
    match value {
        Value::String(file) => {
            let full = base.join(file);
            let doc = read_json(&full).map_err(|e| match e {
                CliError::Io { source, .. } => CliError::config(path, format!("cannot read {}: {source}", full.display())),
                other => other,
            })?;
            Ok((doc, format!("{path}<{file}>")))
        }
        other => Ok((other.clone(), path.to_string())),
    }
}

pub fn load_potential(value: &Value, base: &Path, path: &str) -> Result<Potential, CliError> {
    let (doc, at) = resolve(value, base, path)?;
    let doc: PotentialDoc = parse_at(&doc, &at)?;
    doc.to_potential().map_err(|e| CliError::config(at, e.to_string()))
}

pub fn potential_from_file(file: &Path) -> Result<Potential, CliError> {
    let doc: PotentialDoc = parse_at(&read_json(file)?, "")?;
    doc.to_potential().map_err(|e| CliError::config(file.display().to_string(), e.to_string()))
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
enum SpecPreset {
    Pentagrid { gamma: [f64; 5] },
    PentagridSeeded { seed: u64 },
    SquareBigrid { gamma: [f64; 2] },
}

/// A full spec document, or `{"preset": ...}`.
pub fn load_spec(value: &Value, base: &Path, path: &str) -> Result<MultigridSpec, CliError> {
    let (doc, at) = resolve(value, base, path)?;
    if doc.get("preset").is_some() {
        let preset: SpecPreset = parse_at(&doc, &at)?;
        return Ok(match preset {
            SpecPreset::Pentagrid { gamma } => MultigridSpec::pentagrid(gamma),
            SpecPreset::PentagridSeeded { seed } => MultigridSpec::pentagrid_seeded(seed),
            SpecPreset::SquareBigrid { gamma } => MultigridSpec::square_bigrid(gamma),
        });
    }
    let doc: SpecDoc = parse_at(&doc, &at)?;
    MultigridSpec::from_doc(&doc).map_err(|e| CliError::config(at, e.to_string()))
}

pub fn spec_from_file(file: &Path) -> Result<MultigridSpec, CliError> {
    let base = file.parent().map(Path::to_path_buf).unwrap_or_default();
    load_spec(&read_json(file)?, &base, "")
}

fn two() -> usize {
    2
}

/// Bodies of unit volume.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ShapeDoc {
    /// [0,1]^d.
    UnitCube {
        #[serde(default = "two")]
        dim: usize,
    },
    /// [-1/2,1/2]^d.
    CenteredCube {
        #[serde(default = "two")]
        dim: usize,
    },
    RegularPolygon { sides: usize },
    /// Convex hull of the listed points; must have volume 1.
    Polygon { vertices: Vec<Vec<f64>> },
}

impl ShapeDoc {
    pub fn build(&self, path: &str) -> Result<ConvexPolytope, CliError> {
        let e = match self {
            ShapeDoc::UnitCube { dim } | ShapeDoc::CenteredCube { dim } if !(2..=3).contains(dim) => {
                return Err(CliError::config(format!("{path}.dim"), format!("dimension {dim} is not 2 or 3")))
            }
            ShapeDoc::UnitCube { dim } => unit_cube(*dim),
            ShapeDoc::CenteredCube { dim } => centered_cube(*dim),
            ShapeDoc::RegularPolygon { sides } if *sides < 3 => return Err(CliError::config(format!("{path}.sides"), "need at least 3 sides")),
            ShapeDoc::RegularPolygon { sides } => regular_polygon(*sides, 1.0),
            ShapeDoc::Polygon { vertices } => {
                let pts: Vec<_> = vertices.iter().map(|v| rvec(v)).collect();
                convex_hull(&pts).map_err(|e| CliError::config(format!("{path}.vertices"), e.to_string()))?
            }
        };
        let vol = polytope_measure(&e).volume;
        if (vol - 1.0).abs() > 1e-6 {
            return Err(CliError::config(path, format!("body has volume {vol}, expected 1")));
        }
        Ok(e)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalWeight {
    pub normal: Vec<f64>,
    pub w: f64,
}

/// Facet weights of tiles: `default` for every normal class not listed.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightDoc {
    #[serde(default)]
    pub default: Option<f64>,
    #[serde(default)]
    pub by_normal: Vec<NormalWeight>,
}

impl Default for WeightDoc {
    fn default() -> Self {
        WeightDoc { default: Some(1.0), by_normal: Vec::new() }
    }
}

impl WeightDoc {
    pub fn to_weight(&self) -> TileWeight {
        TileWeight { default: self.default, by_normal: self.by_normal.iter().map(|n| (rvec(&n.normal), n.w)).collect() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    CrystalConverge,
    QcConverge,
    DensityAudit,
    WulffGallery,
    Pathology,
    TileRender,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::CrystalConverge => "crystal-converge",
            Kind::QcConverge => "qc-converge",
            Kind::DensityAudit => "density-audit",
            Kind::WulffGallery => "wulff-gallery",
            Kind::Pathology => "pathology",
            Kind::TileRender => "tile-render",
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    version: u32,
    name: String,
    kind: Kind,
    seed: u64,
    inputs: Value,
    #[serde(default)]
    tolerances: Value,
    #[serde(default)]
    output: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeInputs {
    pub potential: Value,
    pub shape: ShapeDoc,
    pub ns: Vec<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeTolerances {
    /// Bound on rel_err at the largest N.
    pub final_rel_err: Option<f64>,
    /// Bound on rel_err at every N.
    pub max_rel_err: Option<f64>,
    /// |r_{i+1} − r_i| strictly decreasing.
    #[serde(default)]
    pub shrinking_gaps: bool,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QcInputs {
    pub spec: Value,
    #[serde(default)]
    pub weights: WeightDoc,
    pub shape: ShapeDoc,
    pub ns: Vec<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityInputs {
    pub spec: Value,
    pub radius: f64,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityTolerances {
    /// Bound on |fraction − ρ_J| / ρ_J over all J.
    pub max_rel_err: Option<f64>,
    /// Bound on |Σ ρ_J − 1|.
    pub rho_sum: Option<f64>,
    /// Expected class fractions by decreasing tile volume, with relative tolerance.
    pub class_fractions: Option<Vec<f64>>,
    pub class_rel_err: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GalleryItem {
    pub name: String,
    pub potential: Value,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanDoc {
    pub family: String,
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GalleryInputs {
    #[serde(default)]
    pub potentials: Vec<GalleryItem>,
    #[serde(default)]
    pub scans: Vec<ScanDoc>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GalleryTolerances {
    /// Expected class label per gallery item.
    #[serde(default)]
    pub classes: BTreeMap<String, String>,
    /// Class that must occupy a nonempty interval, per scan family.
    #[serde(default)]
    pub scan_classes: BTreeMap<String, String>,
    /// Hausdorff bound for `reference_shapes`.
    pub hausdorff: Option<f64>,
    /// Expected vertex sets per gallery item.
    #[serde(default)]
    pub reference_shapes: BTreeMap<String, Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathologyInputs {
    pub c: f64,
    pub ns: Vec<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathologyTolerances {
    /// Every rescaled energy must be at most this.
    pub max_rescaled: Option<f64>,
    #[serde(default)]
    pub strictly_decreasing: bool,
    #[serde(default)]
    pub positive_phi: bool,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TileInputs {
    pub spec: Value,
    pub radius: f64,
    /// Sample count for the partition check; 0 skips it.
    #[serde(default)]
    pub samples: usize,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TileTolerances {
    /// Expected number of distinct tile shapes (by volume).
    pub tile_classes: Option<usize>,
}

#[derive(Clone, Debug)]
pub enum Task {
    CrystalConverge { potential: Potential, shape: ConvexPolytope, ns: Vec<usize>, tol: ConvergeTolerances },
    QcConverge { spec: MultigridSpec, weights: TileWeight, shape: ConvexPolytope, ns: Vec<usize>, tol: ConvergeTolerances },
    DensityAudit { spec: MultigridSpec, radius: f64, tol: DensityTolerances },
    WulffGallery { items: Vec<(String, Potential)>, scans: Vec<ScanDoc>, tol: GalleryTolerances },
    Pathology { c: f64, ns: Vec<usize>, tol: PathologyTolerances },
    TileRender { spec: MultigridSpec, radius: f64, samples: usize, tol: TileTolerances },
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub kind: Kind,
    pub seed: u64,
    /// Stem of every output file.
    pub output: String,
    pub task: Task,
}

fn check_ns(ns: &[usize], path: &str) -> Result<(), CliError> {
    if ns.is_empty() {
        return Err(CliError::config(path, "N-list is empty"));
    }
    if let Some(i) = ns.windows(2).position(|w| w[1] <= w[0]) {
        return Err(CliError::config(format!("{path}[{}]", i + 1), "N-list must be strictly increasing"));
    }
    Ok(())
}

fn positive(x: f64, path: &str) -> Result<(), CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(CliError::config(path, format!("expected a positive number, got {x}")))
    }
}

fn tolerances<T: DeserializeOwned + Default>(v: &Value) -> Result<T, CliError> {
    if v.is_null() {
        Ok(T::default())
    } else {
        parse_at(v, "tolerances")
    }
}

fn valid_stem(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

impl Scenario {
    /// Parses a scenario; relative input files resolve against `base`.
    pub fn from_value(v: &Value, base: &Path) -> Result<Self, CliError> {
        let doc: ScenarioDoc = parse_at(v, "")?;
        if doc.version != SCENARIO_VERSION {
            return Err(CliError::config("version", format!("unsupported version {}, expected {SCENARIO_VERSION}", doc.version)));
        }
        let output = doc.output.clone().unwrap_or_else(|| doc.name.clone());
        if !valid_stem(&output) {
            return Err(CliError::config(if doc.output.is_some() { "output" } else { "name" }, "use letters, digits, '-' and '_' only"));
        }
        let task = match doc.kind {
            Kind::CrystalConverge => {
                let i: ConvergeInputs = parse_at(&doc.inputs, "inputs")?;
                check_ns(&i.ns, "inputs.ns")?;
                let potential = load_potential(&i.potential, base, "inputs.potential")?;
                let shape = i.shape.build("inputs.shape")?;
                if shape.dim() != potential.dim() {
                    return Err(CliError::config("inputs.shape", format!("dimension {} does not match the potential ({})", shape.dim(), potential.dim())));
                }
                Task::CrystalConverge { potential, shape, ns: i.ns, tol: tolerances(&doc.tolerances)? }
            }
            Kind::QcConverge => {
                let i: QcInputs = parse_at(&doc.inputs, "inputs")?;
                check_ns(&i.ns, "inputs.ns")?;
                let spec = load_spec(&i.spec, base, "inputs.spec")?;
                let shape = i.shape.build("inputs.shape")?;
                Task::QcConverge { spec, weights: i.weights.to_weight(), shape, ns: i.ns, tol: tolerances(&doc.tolerances)? }
            }
            Kind::DensityAudit => {
                let i: DensityInputs = parse_at(&doc.inputs, "inputs")?;
                positive(i.radius, "inputs.radius")?;
                Task::DensityAudit { spec: load_spec(&i.spec, base, "inputs.spec")?, radius: i.radius, tol: tolerances(&doc.tolerances)? }
            }
            Kind::WulffGallery => {
                let i: GalleryInputs = parse_at(&doc.inputs, "inputs")?;
                let mut items = Vec::new();
                for (k, it) in i.potentials.iter().enumerate() {
                    if !valid_stem(&it.name) {
                        return Err(CliError::config(format!("inputs.potentials[{k}].name"), "use letters, digits, '-' and '_' only"));
                    }
                    items.push((it.name.clone(), load_potential(&it.potential, base, &format!("inputs.potentials[{k}].potential"))?));
                }
                for (k, s) in i.scans.iter().enumerate() {
                    if wulffgrid::wulff::ScanFamily::parse(&s.family).is_none() {
                        return Err(CliError::config(format!("inputs.scans[{k}].family"), format!("unknown family `{}`", s.family)));
                    }
                    positive(s.step, &format!("inputs.scans[{k}].step"))?;
                    if s.hi < s.lo {
                        return Err(CliError::config(format!("inputs.scans[{k}].hi"), "hi < lo"));
                    }
                }
                let tol: GalleryTolerances = tolerances(&doc.tolerances)?;
                for name in tol.classes.keys().chain(tol.reference_shapes.keys()) {
                    if !items.iter().any(|(n, _)| n == name) {
                        return Err(CliError::config(format!("tolerances.{name}"), "no gallery item with this name"));
                    }
                }
                Task::WulffGallery { items, scans: i.scans, tol }
            }
            Kind::Pathology => {
                let i: PathologyInputs = parse_at(&doc.inputs, "inputs")?;
                check_ns(&i.ns, "inputs.ns")?;
                Task::Pathology { c: i.c, ns: i.ns, tol: tolerances(&doc.tolerances)? }
            }
            Kind::TileRender => {
                let i: TileInputs = parse_at(&doc.inputs, "inputs")?;
                positive(i.radius, "inputs.radius")?;
                let spec = load_spec(&i.spec, base, "inputs.spec")?;
                if spec.dim() != 2 {
                    return Err(CliError::FormatMismatch { artifact: format!("{}-dimensional tiling", spec.dim()), format: "svg".into() });
                }
                Task::TileRender { spec, radius: i.radius, samples: i.samples, tol: tolerances(&doc.tolerances)? }
            }
        };
        Ok(Scenario { name: doc.name, kind: doc.kind, seed: doc.seed, output, task })
    }

    pub fn from_file(file: &Path) -> Result<Self, CliError> {
        let base: PathBuf = file.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_value(&read_json(file)?, &base)
    }
}
