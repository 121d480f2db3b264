//! Scenario execution. Every artifact is a deterministic function of the
//! scenario document.

use std::path::Path;

use serde::Serialize;

use wulffgrid::geom::export::fmt_num;
use wulffgrid::geom::rvec;
use wulffgrid::io::{convergence_csv, csv_table, ConvergenceRow};
use wulffgrid::lattice_energy::{pathology_configuration, pathology_potential, perimeter_p_v, recovery_configuration, surface_energy};
use wulffgrid::multigrid::{tile_records, tiles_near, tiles_to_svg, verify_tiling};
use wulffgrid::qc_energy::{density_audit, qc_convergence, rail_weights};
use wulffgrid::wulff::{classify_shape, grid, parameter_scan, positivity_check, scan_to_csv, signed_wulff, ScanFamily};
use wulffgrid::{BasisMatrix, Body, ConvexPolytope, MultigridSpec, Potential, Tile};

use crate::config::{ConvergeTolerances, Scenario, Task};
use crate::export::{export_wulff, Format};
use crate::CliError;

/// One declared tolerance and its outcome.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub detail: String,
    pub name: String,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check { detail: detail.into(), name: name.into(), pass }
    }
}

/// Summary written next to the artifacts; fields in key order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
    pub files: Vec<String>,
    pub kind: String,
    pub name: String,
    pub pass: bool,
    pub seed: u64,
}

struct Outputs<'a> {
    dir: &'a Path,
    stem: &'a str,
    files: Vec<String>,
}

impl Outputs<'_> {
    fn write(&mut self, suffix: &str, body: &str) -> Result<(), CliError> {
        let name = format!("{}{suffix}", self.stem);
        let path = self.dir.join(&name);
        std::fs::write(&path, body).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        self.files.push(name);
        Ok(())
    }
}

fn convergence_checks(rows: &[ConvergenceRow], tol: &ConvergeTolerances) -> Vec<Check> {
    let mut out = Vec::new();
    if let (Some(t), Some(last)) = (tol.final_rel_err, rows.last()) {
        out.push(Check::new("final_rel_err", last.rel_err <= t, format!("N={}: {} <= {}", last.n, fmt_num(last.rel_err), fmt_num(t))));
    }
    if let Some(t) = tol.max_rel_err {
        let worst = rows.iter().map(|r| r.rel_err).fold(0.0, f64::max);
        out.push(Check::new("max_rel_err", worst <= t, format!("{} <= {}", fmt_num(worst), fmt_num(t))));
    }
    if tol.shrinking_gaps {
        let gaps: Vec<f64> = rows.windows(2).map(|w| (w[1].rescaled_energy - w[0].rescaled_energy).abs()).collect();
        let ok = gaps.windows(2).all(|g| g[1] < g[0]);
        let shown: Vec<String> = gaps.iter().map(|g| fmt_num(*g)).collect();
        out.push(Check::new("shrinking_gaps", ok, shown.join(" > ")));
    }
    out
}

/// Tiles centered within `radius` of the origin.
pub fn tiles_in_disk(spec: &MultigridSpec, radius: f64) -> Result<Vec<Tile>, CliError> {
    Ok(tiles_near(spec, &rvec(&vec![0.0; spec.dim()]), radius)?)
}

fn tile_class_count(tiles: &[Tile]) -> usize {
    let mut vols: Vec<f64> = tiles.iter().map(|t| t.volume()).collect();
    vols.sort_by(f64::total_cmp);
    vols.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs().max(1.0));
    vols.len()
}

fn crystal_rows(potential: &Potential, shape: &ConvexPolytope, ns: &[usize]) -> Result<Vec<ConvergenceRow>, CliError> {
    let d = shape.dim() as f64;
    let target = perimeter_p_v(shape, potential, &BasisMatrix::identity(shape.dim()));
    ns.iter()
        .map(|&n| {
            let r = recovery_configuration(shape, n)?;
            let f = surface_energy(&r.configuration, potential);
            Ok(ConvergenceRow::new(n, f / (n as f64).powf((d - 1.0) / d), target))
        })
        .collect()
}

pub fn run_scenario(sc: &Scenario, out_dir: &Path) -> Result<Report, CliError> {
    std::fs::create_dir_all(out_dir).map_err(|source| CliError::Io { path: out_dir.display().to_string(), source })?;
    let mut out = Outputs { dir: out_dir, stem: &sc.output, files: Vec::new() };
    let mut checks = Vec::new();
    match &sc.task {
        Task::CrystalConverge { potential, shape, ns, tol } => {
            let rows = crystal_rows(potential, shape, ns)?;
            out.write(".csv", &convergence_csv(&rows))?;
            checks.extend(convergence_checks(&rows, tol));
        }
        Task::QcConverge { spec, weights, shape, ns, tol } => {
            let pot = rail_weights(spec, weights)?;
            let qc = qc_convergence(spec, &pot, shape, ns)?;
            let rows: Vec<ConvergenceRow> = qc.iter().map(|r| ConvergenceRow::new(r.n, r.rescaled, r.target)).collect();
            out.write(".csv", &convergence_csv(&rows))?;
            let detail: Vec<Vec<String>> = qc
                .iter()
                .map(|r| vec![r.n.to_string(), r.y_count.to_string(), r.correction.to_string(), fmt_num(r.energy), fmt_num(r.rescaled), fmt_num(r.literal)])
                .collect();
            out.write("-detail.csv", &csv_table(&["N", "y_count", "correction", "oriented_energy", "rescaled_energy", "literal_energy"], &detail))?;
            checks.extend(convergence_checks(&rows, tol));
        }
        Task::DensityAudit { spec, radius, tol } => {
            let a = density_audit(spec, *radius)?;
            let rows: Vec<Vec<String>> = a
                .subsets
                .iter()
                .map(|s| {
                    let j: Vec<String> = s.j.iter().map(|g| g.to_string()).collect();
                    vec![j.join("-"), s.count.to_string(), fmt_num(s.expected_count), fmt_num(s.area_fraction), fmt_num(s.rho), fmt_num(s.rel_err)]
                })
                .collect();
            out.write(".csv", &csv_table(&["J", "count", "expected_count", "area_fraction", "rho", "rel_err"], &rows))?;
            let classes: Vec<Vec<String>> =
                a.classes.iter().map(|c| vec![fmt_num(c.tile_volume), c.subsets.to_string(), fmt_num(c.fraction), fmt_num(c.expected)]).collect();
            out.write("-classes.csv", &csv_table(&["tile_volume", "subsets", "fraction", "expected"], &classes))?;
            if let Some(t) = tol.max_rel_err {
                checks.push(Check::new("max_rel_err", a.max_rel_err <= t, format!("{} <= {}", fmt_num(a.max_rel_err), fmt_num(t))));
            }
            if let Some(t) = tol.rho_sum {
                let dev = (a.rho_sum - 1.0).abs();
                checks.push(Check::new("rho_sum", dev <= t, format!("|sum - 1| = {dev:.3e} <= {t:.3e}")));
            }
            if let Some(expected) = &tol.class_fractions {
                let t = tol.class_rel_err.unwrap_or(0.02);
                let ok = expected.len() == a.classes.len()
                    && expected.iter().zip(&a.classes).all(|(e, c)| (c.fraction - e).abs() <= t * e.abs());
                let got: Vec<String> = a.classes.iter().map(|c| fmt_num(c.fraction)).collect();
                checks.push(Check::new("class_fractions", ok, format!("{} (relative tolerance {})", got.join(":"), fmt_num(t))));
            }
        }
        Task::WulffGallery { items, scans, tol } => {
            let mut rows = Vec::new();
            for (name, pot) in items {
                let phi = pot.support_function(&BasisMatrix::identity(pot.dim()));
                let w = signed_wulff(&phi)?;
                let pos = positivity_check(&phi);
                let (label, nv, nf, zono) = match classify_shape(&w) {
                    Ok(c) => (c.label, c.n_vertices, c.n_facets, c.zonotope.to_string()),
                    Err(_) => (if w.body.is_empty() { "empty".into() } else { "degenerate".into() }, w.body.vertices().len(), 0, String::new()),
                };
                if !w.degenerate {
                    let fmt = if pot.dim() == 3 { Format::Off } else { Format::Svg };
                    out.write(&format!("-{name}.{}", fmt.extension()), &export_wulff(&w, fmt)?)?;
                }
                if let Some(expect) = tol.classes.get(name) {
                    checks.push(Check::new(format!("class:{name}"), &label == expect, format!("{label} (expected {expect})")));
                }
                if let Some(verts) = tol.reference_shapes.get(name) {
                    let reference = Body::from_points(pot.dim(), &verts.iter().map(|v| rvec(v)).collect::<Vec<_>>());
                    let h = w.body.hausdorff(&reference);
                    let t = tol.hausdorff.unwrap_or(1e-9);
                    checks.push(Check::new(format!("shape:{name}"), h <= t, format!("Hausdorff {h:.3e} <= {t:.3e}")));
                }
                rows.push(vec![name.clone(), label, nv.to_string(), nf.to_string(), zono, fmt_num(pos.min)]);
            }
            if !rows.is_empty() {
                out.write(".csv", &csv_table(&["name", "class", "n_vertices", "n_facets", "zonotope", "positivity_min"], &rows))?;
            }
            for s in scans {
                let fam = ScanFamily::parse(&s.family).expect("validated at load");
                let rep = parameter_scan(fam, &grid(s.lo, s.hi, s.step))?;
                out.write(&format!("-scan-{}.csv", fam.name()), &scan_to_csv(&rep))?;
                let intervals: Vec<String> = rep.intervals.iter().map(|i| format!("{} on [{}, {}]", i.class, fmt_num(i.lo), fmt_num(i.hi))).collect();
                let claimed = rep.claimed.as_ref().map(|(c, lo, hi)| format!("; literature: {c} on ({}, {}]", fmt_num(*lo), fmt_num(*hi))).unwrap_or_default();
                // informational; the literature interval is not asserted
                checks.push(Check::new(format!("scan:{}", fam.name()), true, format!("{}{claimed}", intervals.join(", "))));
                if let Some(class) = tol.scan_classes.get(&s.family) {
                    let found = !rep.intervals_of(|c| c == class).is_empty();
                    checks.push(Check::new(format!("scan-class:{}", fam.name()), found, format!("{class} interval present: {found}")));
                }
            }
        }
        Task::Pathology { c, ns, tol } => {
            let v = pathology_potential(*c);
            let pos = positivity_check(&v.support_function(&BasisMatrix::identity(2)));
            let mut rows = Vec::new();
            let mut rescaled = Vec::new();
            for &n in ns {
                let x = pathology_configuration(n);
                let f = surface_energy(&x, &v);
                let r = f / (x.len() as f64).sqrt();
                rescaled.push(r);
                rows.push(vec![n.to_string(), x.len().to_string(), fmt_num(f), fmt_num(r)]);
            }
            out.write(".csv", &csv_table(&["N", "points", "surface_energy", "rescaled_energy"], &rows))?;
            if tol.positive_phi {
                checks.push(Check::new("positive_phi", pos.min > 0.0, format!("min phi = {}", fmt_num(pos.min))));
            }
            if let Some(t) = tol.max_rescaled {
                let worst = rescaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                checks.push(Check::new("max_rescaled", worst <= t, format!("{} <= {}", fmt_num(worst), fmt_num(t))));
            }
            if tol.strictly_decreasing {
                let ok = rescaled.windows(2).all(|w| w[1] < w[0]);
                checks.push(Check::new("strictly_decreasing", ok, rescaled.iter().map(|r| fmt_num(*r)).collect::<Vec<_>>().join(" > ")));
            }
        }
        Task::TileRender { spec, radius, samples, tol } => {
            let tiles = tiles_in_disk(spec, *radius)?;
            let svg = tiles_to_svg(spec, &tiles).ok_or_else(|| CliError::FormatMismatch { artifact: "tiling".into(), format: "svg".into() })?;
            out.write(".svg", &svg)?;
            out.write("-tiles.jsonl", &tile_records(&tiles))?;
            if *samples > 0 {
                let r = verify_tiling(spec, &rvec(&vec![0.0; spec.dim()]), *radius, *samples, sc.seed)?;
                checks.push(Check::new("tiling", r.band_ok, format!("{} samples covered once, {} tiles", r.samples, r.tiles)));
            }
            if let Some(n) = tol.tile_classes {
                let got = tile_class_count(&tiles);
                checks.push(Check::new("tile_classes", got == n, format!("{got} (expected {n})")));
            }
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    let summary_name = format!("{}.summary.json", sc.output);
    let mut files = out.files.clone();
    files.push(summary_name.clone());
    let report = Report { checks, files, kind: sc.kind.name().into(), name: sc.name.clone(), pass, seed: sc.seed };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    out.write(".summary.json", &text)?;
    Ok(report)
}
