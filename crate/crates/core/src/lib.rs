//! Discrete surface energies on lattices and multigrid quasicrystals, their
//! continuum anisotropies, and Wulff shapes of finitely supported potentials.
//!
//! Module map:
//! - [`geom`]: hulls, halfspaces, Minkowski operations, integer lattices.
//! - [`lattice_energy`]: bond energies on Z^d, sublattice channels, recovery sets.
//! - [`anisotropy`]: support functions built from weighted atoms.
//! - [`wulff`]: zonotopes, signed Wulff shapes, classification and scans.
//! - [`multigrid`]: hyperplane multigrids, dual points, tiles and rails.
//! - [`qc_energy`]: tile energies, edge-perimeter counts, densities, recovery.
//! - [`io`]: config documents and line-oriented exports.

pub mod anisotropy;
pub mod geom;
pub mod io;
pub mod lattice_energy;
pub mod multigrid;
pub mod qc_energy;
pub mod wulff;

pub use anisotropy::{EvalMode, SupportFunction};
pub use geom::{BasisMatrix, Body, ConvexPolytope, GeomError, Hyperplane, IntVector, RealVector};
pub use lattice_energy::{Configuration, Convention, EnergyError, Potential, SublatticeChannel};
pub use multigrid::{DualPoint, MultigridError, MultigridSpec, RailFamily, Tile};
pub use qc_energy::{QcError, RailPotential, TileSet, TileWeight};
pub use wulff::{WulffError, WulffShape};
