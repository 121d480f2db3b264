//! Fixtures shared by the benchmarks.

use wulffgrid::multigrid::rail_families;
use wulffgrid::qc_energy::rail_weights;
use wulffgrid::{MultigridSpec, RailPotential, TileWeight};

pub const GAMMA: [f64; 5] = [0.13, 0.41, 0.27, 0.66, 0.85];

pub fn pentagrid() -> MultigridSpec {
    MultigridSpec::pentagrid(GAMMA)
}

/// Unit weight on every tile edge.
pub fn unit_rails(spec: &MultigridSpec) -> RailPotential {
    debug_assert!(!rail_families(spec).is_empty());
    rail_weights(spec, &TileWeight::uniform(1.0)).expect("uniform weights are valid")
}
