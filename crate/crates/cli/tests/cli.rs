use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::json;
use tempfile::TempDir;

use wulffgrid::wulff::signed_wulff;
use wulffgrid::{BasisMatrix, Potential};
use wulffgrid_cli::commands::{self, parse_scan, AuditOptions};
use wulffgrid_cli::export::{export_wulff, Format};
use wulffgrid_cli::{run_scenario, CliError, Scenario};

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn bundled() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(scenarios_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    v.sort();
    v
}

fn config_path(err: CliError) -> String {
    match err {
        CliError::Config { path, .. } => path,
        other => panic!("expected a config error, got {other}"),
    }
}

fn parse(v: serde_json::Value) -> Result<Scenario, CliError> {
    Scenario::from_value(&v, &scenarios_dir())
}

fn base_scenario() -> serde_json::Value {
    json!({
        "version": 1,
        "name": "sq",
        "kind": "crystal-converge",
        "seed": 3,
        "inputs": {
            "potential": "inputs/nearest-neighbor-2d.json",
            "shape": {"kind": "unit-cube"},
            "ns": [100, 400, 2500]
        },
        "tolerances": {"max_rel_err": 0.0}
    })
}

#[test]
fn bundled_scenarios_pass_and_are_reproducible() {
    let files = bundled();
    assert!(files.len() >= 6);
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let mut kinds = Vec::new();
    for f in &files {
        let sc = Scenario::from_file(f).unwrap();
        kinds.push(sc.kind);
        let ra = run_scenario(&sc, a.path()).unwrap();
        assert!(ra.pass, "{}: {:?}", f.display(), ra.checks);
        let rb = run_scenario(&Scenario::from_file(f).unwrap(), b.path()).unwrap();
        assert_eq!(ra, rb);
        for name in &ra.files {
            assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name} differs between runs");
        }
    }
    kinds.sort_by_key(|k| k.name());
    kinds.dedup();
    assert_eq!(kinds.len(), 6, "every scenario kind has a bundled example");
}

#[test]
fn crystal_square_rescaled_energy_is_four() {
    let dir = TempDir::new().unwrap();
    let rep = run_scenario(&parse(base_scenario()).unwrap(), dir.path()).unwrap();
    assert!(rep.pass);
    let csv = fs::read_to_string(dir.path().join("sq.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "N,rescaled_energy,target,rel_err");
    assert_eq!(&lines[1..], &["100,4.000000000,4.000000000,0.000000000", "400,4.000000000,4.000000000,0.000000000", "2500,4.000000000,4.000000000,0.000000000"]);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("sq.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["pass"], json!(true));
    assert_eq!(summary["seed"], json!(3));
}

#[test]
fn pathology_column_is_negative_and_decreasing() {
    let dir = TempDir::new().unwrap();
    let sc = Scenario::from_file(&scenarios_dir().join("pathology.json")).unwrap();
    run_scenario(&sc, dir.path()).unwrap();
    let csv = fs::read_to_string(dir.path().join("pathology.csv")).unwrap();
    let col: Vec<f64> = csv.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(col.len(), 2);
    assert!(col[0] < 0.0 && col[1] < col[0]);
}

#[test]
fn tile_render_colors_by_subset() {
    let dir = TempDir::new().unwrap();
    let sc = Scenario::from_file(&scenarios_dir().join("pentagrid-tiles.json")).unwrap();
    run_scenario(&sc, dir.path()).unwrap();
    let svg = fs::read_to_string(dir.path().join("pentagrid-tiles.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    let mut js: Vec<&str> = svg.match_indices("data-j=\"").map(|(i, _)| &svg[i + 8..i + 8 + svg[i + 8..].find('"').unwrap()]).collect();
    js.sort();
    js.dedup();
    assert_eq!(js.len(), 10);
    let records = fs::read_to_string(dir.path().join("pentagrid-tiles-tiles.jsonl")).unwrap();
    let first: serde_json::Value = serde_json::from_str(records.lines().next().unwrap()).unwrap();
    assert!(first.get("J").is_some() && first.get("anchor").is_some());
}

#[test]
fn failing_tolerance_is_reported() {
    let mut v = base_scenario();
    v["inputs"]["shape"] = json!({"kind": "regular-polygon", "sides": 64});
    v["tolerances"] = json!({"final_rel_err": 1e-6});
    let dir = TempDir::new().unwrap();
    let rep = run_scenario(&parse(v).unwrap(), dir.path()).unwrap();
    assert!(!rep.pass);
    assert_eq!(rep.checks[0].name, "final_rel_err");
}

#[test]
fn config_errors_carry_field_paths() {
    let mut v = base_scenario();
    v.as_object_mut().unwrap().remove("seed");
    assert_eq!(config_path(parse(v).unwrap_err()), "");

    let mut v = base_scenario();
    v["version"] = json!(2);
    assert_eq!(config_path(parse(v).unwrap_err()), "version");

    let mut v = base_scenario();
    v["inputs"]["ns"] = json!([100, 400, 400]);
    assert_eq!(config_path(parse(v).unwrap_err()), "inputs.ns[2]");

    let mut v = base_scenario();
    v["inputs"]["ns"] = json!([100, "x"]);
    assert_eq!(config_path(parse(v).unwrap_err()), "inputs.ns[1]");

    let mut v = base_scenario();
    v["inputs"]["potential"] = json!({"convention": "crystal", "atoms": [{"v": [1, 0], "w": "heavy"}]});
    assert_eq!(config_path(parse(v).unwrap_err()), "inputs.potential.atoms[0].w");

    let mut v = base_scenario();
    v["inputs"]["potential"] = json!("inputs/missing.json");
    assert_eq!(config_path(parse(v).unwrap_err()), "inputs.potential");

    let mut v = base_scenario();
    v["inputs"]["shape"] = json!({"kind": "regular-polygon", "sides": 2});
    assert_eq!(config_path(parse(v).unwrap_err()), "inputs.shape.sides");

    let mut v = base_scenario();
    v["tolerances"] = json!({"final_rel_err": 0.1, "typo": 1});
    assert!(config_path(parse(v).unwrap_err()).starts_with("tolerances"));

    let mut v = base_scenario();
    v["kind"] = json!("qc-converge");
    v["inputs"] = json!({"spec": {"dimension": 2, "normals": [[1, 0], [0, 1]], "translations": [0.25]}, "shape": {"kind": "centered-cube"}, "ns": [300]});
    assert_eq!(config_path(parse(v).unwrap_err()), "inputs.spec");

    let mut v = base_scenario();
    v["name"] = json!("../escape");
    assert_eq!(config_path(parse(v).unwrap_err()), "name");
}

#[test]
fn format_mismatch() {
    let square = Potential::nearest_neighbor(2, -1.0);
    let w = signed_wulff(&square.support_function(&BasisMatrix::identity(2))).unwrap();
    assert!(matches!(export_wulff(&w, Format::Off), Err(CliError::FormatMismatch { .. })));
    let svg = export_wulff(&w, Format::Svg).unwrap();
    assert!(svg.contains(" Z\""));

    let dir = TempDir::new().unwrap();
    let spec = scenarios_dir().join("inputs/pentagrid.json");
    let err = commands::tile(&spec, 5.0, &dir.path().join("tiles.off")).unwrap_err();
    assert!(matches!(err, CliError::FormatMismatch { .. }));
}

#[test]
fn wulff_command_writes_octahedron() {
    let dir = TempDir::new().unwrap();
    let off = dir.path().join("oct.off");
    let csv = dir.path().join("scan.csv");
    let o = commands::wulff(Some(&scenarios_dir().join("inputs/fcc-minus-axes.json")), Some("fcc-minus-axes:0.3:1.2:0.1"), Some(&off), None, Some(&csv)).unwrap();
    assert_eq!(o.shape.unwrap().1, wulffgrid::wulff::OCTAHEDRON);
    let text = fs::read_to_string(&off).unwrap();
    assert!(text.starts_with("OFF\n6 8 12\n"));
    assert!(text.contains("3.000000000 0.000000000 0.000000000"));
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 11);
    assert!(o.scan.unwrap().claimed.is_some());
}

#[test]
fn scan_argument_parsing() {
    let s = parse_scan("pyritohedron:0:0.5:0.05").unwrap();
    assert_eq!((s.lo, s.hi, s.step), (0.0, 0.5, 0.05));
    for bad in ["pyritohedron:0:0.5", "nope:0:1:0.1", "icosahedral:1:0:0.1", "icosahedral:0:1:0", "icosahedral:a:1:0.1"] {
        assert_eq!(config_path(parse_scan(bad).unwrap_err()), "--scan", "{bad}");
    }
}

#[test]
fn audit_checks() {
    let spec = scenarios_dir().join("inputs/pentagrid.json");
    let checks: Vec<String> = commands::AUDIT_CHECKS.iter().map(|s| s.to_string()).collect();
    let opt = AuditOptions { density_radius: 80.0, density_tol: 0.05, ..AuditOptions::default() };
    let out = commands::audit(&spec, &checks, &opt).unwrap();
    assert_eq!(out.len(), 4);
    assert!(out.iter().all(|c| c.pass), "{out:?}");
    assert_eq!(config_path(commands::audit(&spec, &["volume".into()], &opt).unwrap_err()), "--checks");
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wulffgrid"))
}

#[test]
fn binary_exit_codes() {
    let dir = TempDir::new().unwrap();
    let ok = bin().args(["run", "--scenario"]).arg(scenarios_dir().join("pathology.json")).arg("--out").arg(dir.path()).output().unwrap();
    assert!(ok.status.success());
    assert!(String::from_utf8_lossy(&ok.stdout).contains("[PASS] max_rescaled"));

    let mut v = base_scenario();
    v["inputs"]["potential"] = json!(scenarios_dir().join("inputs/nearest-neighbor-2d.json"));
    v["inputs"]["shape"] = json!({"kind": "regular-polygon", "sides": 64});
    v["tolerances"] = json!({"final_rel_err": 1e-6});
    let file = dir.path().join("strict.json");
    fs::write(&file, v.to_string()).unwrap();
    let fail = bin().args(["run", "--scenario"]).arg(&file).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(fail.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&fail.stdout).contains("[FAIL] final_rel_err"));

    let svg = dir.path().join("t.svg");
    let tile = bin().args(["tile", "--spec"]).arg(scenarios_dir().join("inputs/pentagrid.json")).args(["--radius", "8", "--svg"]).arg(&svg).output().unwrap();
    assert!(tile.status.success());
    assert!(fs::read_to_string(&svg).unwrap().contains("<polygon"));

    let bad = bin().args(["audit", "--spec"]).arg(scenarios_dir().join("inputs/pentagrid.json")).args(["--checks", "nonsense"]).output().unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("--checks"));
}
