use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use wulffgrid_cli::commands::{self, AuditOptions};
use wulffgrid_cli::{run_scenario, Check, Scenario};

#[derive(Parser)]
#[command(name = "wulffgrid", version, about = "Lattice and quasicrystal surface energy experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario document and write its artifacts.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render the tiles of a two-dimensional multigrid inside a disk.
    Tile {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        radius: f64,
        #[arg(long)]
        svg: PathBuf,
    },
    /// Wulff shape of a potential and/or a classification scan.
    Wulff {
        #[arg(long)]
        potential: Option<PathBuf>,
        /// family:lo:hi:step
        #[arg(long)]
        scan: Option<String>,
        #[arg(long)]
        off: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Scan table output.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check a multigrid spec.
    Audit {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "densities,bd,tiling,cauchy-binet")]
        checks: Vec<String>,
        #[arg(long, default_value_t = 200.0)]
        density_radius: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn print_checks(checks: &[Check]) -> bool {
    for c in checks {
        println!("[{}] {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    checks.iter().all(|c| c.pass)
}

fn main() -> Result<ExitCode> {
    let cli = Cli::parse();
    let ok = match cli.command {
        Command::Run { scenario, out } => {
            let sc = Scenario::from_file(&scenario)?;
            let report = run_scenario(&sc, &out)?;
            for f in &report.files {
                println!("wrote {}", out.join(f).display());
            }
            print_checks(&report.checks)
        }
        Command::Tile { spec, radius, svg } => {
            let n = commands::tile(&spec, radius, &svg)?;
            println!("wrote {} tiles to {}", n, svg.display());
            true
        }
        Command::Wulff { potential, scan, off, svg, csv } => {
            let o = commands::wulff(potential.as_deref(), scan.as_deref(), off.as_deref(), svg.as_deref(), csv.as_deref())?;
            if let Some((w, label)) = &o.shape {
                println!("shape: {label} ({} vertices)", w.body.vertices().len());
            }
            if let Some(rep) = &o.scan {
                for i in &rep.intervals {
                    println!("{}: {} on [{}, {}]", rep.family, i.class, i.lo, i.hi);
                }
                if let Some((c, lo, hi)) = &rep.claimed {
                    println!("literature: {c} on ({lo}, {hi}]");
                }
            }
            true
        }
        Command::Audit { spec, checks, density_radius, seed } => {
            let opt = AuditOptions { density_radius, seed, ..AuditOptions::default() };
            print_checks(&commands::audit(&spec, &checks, &opt)?)
        }
    };
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
