//! The `tile`, `wulff` and `audit` subcommands.

use std::path::Path;

use wulffgrid::geom::export::fmt_num;
use wulffgrid::geom::rvec;
use wulffgrid::multigrid::{affine_map_and_bound, cauchy_binet, for_each_dual_point, tile_of, tiles_to_svg, verify_tiling, Region};
use wulffgrid::qc_energy::density_audit;
use wulffgrid::wulff::{classify_shape, grid, parameter_scan, scan_to_csv, signed_wulff, ScanFamily, ScanReport};
use wulffgrid::{BasisMatrix, MultigridSpec, WulffShape};

use crate::config::{potential_from_file, spec_from_file};
use crate::export::{export_wulff, Format};
use crate::run::{tiles_in_disk, Check};
use crate::CliError;

pub fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn require_format(path: &Path, want: Format, flag: &str) -> Result<(), CliError> {
    match Format::from_path(path) {
        Some(f) if f == want => Ok(()),
        _ => Err(CliError::FormatMismatch { artifact: format!("{flag} {}", path.display()), format: want.extension().into() }),
    }
}

/// Renders the tiles centered in the disk of the given radius; returns the tile count.
pub fn tile(spec_file: &Path, radius: f64, svg: &Path) -> Result<usize, CliError> {
    require_format(svg, Format::Svg, "--svg")?;
    if !(radius.is_finite() && radius > 0.0) {
        return Err(CliError::config("--radius", format!("expected a positive number, got {radius}")));
    }
    let spec = spec_from_file(spec_file)?;
    let tiles = tiles_in_disk(&spec, radius)?;
    let doc = tiles_to_svg(&spec, &tiles).ok_or_else(|| CliError::FormatMismatch { artifact: format!("{}-dimensional tiling", spec.dim()), format: "svg".into() })?;
    write_file(svg, &doc)?;
    Ok(tiles.len())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanArg {
    pub family: ScanFamily,
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

/// `name:lo:hi:step`.
pub fn parse_scan(s: &str) -> Result<ScanArg, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = |m: &str| CliError::config("--scan", format!("{m} in `{s}`; expected name:lo:hi:step"));
    if parts.len() != 4 {
        return Err(bad("wrong number of fields"));
    }
    let family = ScanFamily::parse(parts[0]).ok_or_else(|| bad("unknown family"))?;
    let num = |t: &str| t.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| bad("not a number"));
    let (lo, hi, step) = (num(parts[1])?, num(parts[2])?, num(parts[3])?);
    if step <= 0.0 || hi < lo {
        return Err(bad("empty range"));
    }
    Ok(ScanArg { family, lo, hi, step })
}

pub struct WulffOutcome {
    pub shape: Option<(WulffShape, String)>,
    pub scan: Option<ScanReport>,
}

pub fn wulff(potential: Option<&Path>, scan: Option<&str>, off: Option<&Path>, svg: Option<&Path>, csv: Option<&Path>) -> Result<WulffOutcome, CliError> {
    if potential.is_none() && scan.is_none() {
        return Err(CliError::config("--potential", "give --potential, --scan, or both"));
    }
    for (p, f, flag) in [(off, Format::Off, "--off"), (svg, Format::Svg, "--svg"), (csv, Format::Csv, "--csv")] {
        if let Some(p) = p {
            require_format(p, f, flag)?;
        }
    }
    let scan = scan.map(parse_scan).transpose()?;
    let mut outcome = WulffOutcome { shape: None, scan: None };
    if let Some(file) = potential {
        let pot = potential_from_file(file)?;
        let w = signed_wulff(&pot.support_function(&BasisMatrix::identity(pot.dim())))?;
        let label = classify_shape(&w).map(|c| c.label).unwrap_or_else(|_| if w.body.is_empty() { "empty".into() } else { "degenerate".into() });
        if let Some(p) = off {
            write_file(p, &export_wulff(&w, Format::Off)?)?;
        }
        if let Some(p) = svg {
            write_file(p, &export_wulff(&w, Format::Svg)?)?;
        }
        outcome.shape = Some((w, label));
    } else if off.is_some() || svg.is_some() {
        return Err(CliError::config("--potential", "shape export needs a potential"));
    }
    if let Some(s) = scan {
        let rep = parameter_scan(s.family, &grid(s.lo, s.hi, s.step))?;
        if let Some(p) = csv {
            write_file(p, &scan_to_csv(&rep))?;
        }
        outcome.scan = Some(rep);
    }
    Ok(outcome)
}

pub const AUDIT_CHECKS: [&str; 4] = ["densities", "bd", "tiling", "cauchy-binet"];

#[derive(Clone, Debug)]
pub struct AuditOptions {
    pub density_radius: f64,
    pub density_tol: f64,
    pub bd_radius: f64,
    pub tiling_radius: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions { density_radius: 200.0, density_tol: 0.02, bd_radius: 100.0, tiling_radius: 30.0, samples: 10_000, seed: 0 }
    }
}

pub fn audit_spec(spec: &MultigridSpec, checks: &[String], opt: &AuditOptions) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for name in checks {
        let c = match name.as_str() {
            "densities" => {
                let a = density_audit(spec, opt.density_radius)?;
                let dev = (a.rho_sum - 1.0).abs();
                let pass = a.max_rel_err <= opt.density_tol && dev <= 1e-12;
                Check::new(name, pass, format!("max relative error {} at dual radius {}; |sum rho - 1| = {dev:.3e}", fmt_num(a.max_rel_err), fmt_num(opt.density_radius)))
            }
            "bd" => {
                let a = affine_map_and_bound(spec);
                let mut worst: f64 = 0.0;
                let n = for_each_dual_point(spec, &Region::centered(spec.dim(), opt.bd_radius), |p| {
                    worst = worst.max((tile_of(spec, p).center() - a.apply(&p.x)).norm());
                })?;
                Check::new(name, worst <= a.bd_bound, format!("{n} dual points, max distortion {} <= {}", fmt_num(worst), fmt_num(a.bd_bound)))
            }
            "tiling" => match verify_tiling(spec, &rvec(&vec![0.0; spec.dim()]), opt.tiling_radius, opt.samples, opt.seed) {
                Ok(r) => Check::new(name, r.band_ok, format!("{} samples each in one of {} tiles", r.samples, r.tiles)),
                Err(e) => Check::new(name, false, e.to_string()),
            },
            "cauchy-binet" => {
                let (lhs, rhs) = cauchy_binet(spec);
                let scale: f64 = spec.subsets().iter().map(|j| (spec.det_normals(j) * spec.det_edges(j)).abs()).sum::<f64>().max(1.0);
                Check::new(name, (lhs - rhs).abs() <= 1e-9 * scale, format!("det = {}, sum = {}", fmt_num(lhs), fmt_num(rhs)))
            }
            other => return Err(CliError::config("--checks", format!("unknown check `{other}`; expected one of {}", AUDIT_CHECKS.join(",")))),
        };
        out.push(c);
    }
    Ok(out)
}

pub fn audit(spec_file: &Path, checks: &[String], opt: &AuditOptions) -> Result<Vec<Check>, CliError> {
    audit_spec(&spec_from_file(spec_file)?, checks, opt)
}
