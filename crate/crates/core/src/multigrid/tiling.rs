//! Runtime check that the tiles of a multigrid partition a ball.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{affine_map_and_bound, dual_points_in_region, tile_of, validate_spec, AffineMap, MultigridError, MultigridSpec, Region, Tile};
use crate::geom::RealVector;

const TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TilingReport {
    pub tiles: usize,
    pub samples: usize,
    pub resampled: usize,
    pub bd_bound: f64,
    pub max_diameter: f64,
    pub window_volume: f64,
    /// Total volume of tiles inside the window.
    pub inside_volume: f64,
    /// Total volume of tiles meeting the window.
    pub touching_volume: f64,
    /// inside <= window <= touching, and touching − inside fits in the
    /// boundary band of width bd_bound + max_diameter.
    pub band_ok: bool,
}

pub(crate) fn ball_volume(d: usize, r: f64) -> f64 {
    let unit = match d {
        0 => 1.0,
        1 => 2.0,
        _ => {
            let mut v = [1.0, 2.0];
            for k in 2..=d {
                let next = v[0] * 2.0 * std::f64::consts::PI / k as f64;
                v = [v[1], next];
            }
            v[1]
        }
    };
    unit * r.powi(d as i32)
}

/// Uniform bucket grid over tile bounding boxes.
pub(crate) struct TileGrid {
    cell: f64,
    buckets: HashMap<Vec<i64>, Vec<usize>>,
}

impl TileGrid {
    fn key(&self, x: &RealVector) -> Vec<i64> {
        x.iter().map(|c| (c / self.cell).floor() as i64).collect()
    }

    pub(crate) fn new(tiles: &[Tile], cell: f64) -> Self {
        let mut grid = TileGrid { cell, buckets: HashMap::new() };
        for (i, t) in tiles.iter().enumerate() {
            let vs = t.vertices();
            let d = t.dim();
            let lo: Vec<i64> = (0..d).map(|a| (vs.iter().map(|v| v[a]).fold(f64::INFINITY, f64::min) / cell).floor() as i64).collect();
            let hi: Vec<i64> = (0..d).map(|a| (vs.iter().map(|v| v[a]).fold(f64::NEG_INFINITY, f64::max) / cell).floor() as i64).collect();
            let mut k = lo.clone();
            'outer: loop {
                grid.buckets.entry(k.clone()).or_default().push(i);
                let mut a = d;
                loop {
                    if a == 0 {
                        break 'outer;
                    }
                    a -= 1;
                    if k[a] < hi[a] {
                        k[a] += 1;
                        break;
                    }
                    k[a] = lo[a];
                }
            }
        }
        grid
    }

    pub(crate) fn candidates(&self, x: &RealVector) -> &[usize] {
        self.buckets.get(&self.key(x)).map(|v| v.as_slice()).unwrap_or(&[])
    }
}

fn sample_ball(rng: &mut ChaCha8Rng, center: &RealVector, r: f64) -> RealVector {
    let d = center.len();
    loop {
        let u = RealVector::from_fn(d, |_, _| rng.gen_range(-1.0..1.0));
        if u.norm_squared() <= 1.0 {
            return center + u * r;
        }
    }
}

/// All tiles whose center lies within `radius` of `center`, in dual point order.
pub fn tiles_near(spec: &MultigridSpec, center: &RealVector, radius: f64) -> Result<Vec<Tile>, MultigridError> {
    let a = affine_map_and_bound(spec);
    // a tile center is within bd_bound of the image of its dual point
    let dual = Region::ball(a.inverse_apply(center), (radius + a.bd_bound) * a.inverse_norm());
    Ok(dual_points_in_region(spec, &dual)?.iter().map(|p| tile_of(spec, p)).filter(|t| (t.center() - center).norm() <= radius).collect())
}

/// Generates every tile that can reach the ball B(center, radius) and checks
/// that `n_samples` uniform points of the ball each lie in exactly one tile.
/// Points within 1e-9 of a tile boundary are redrawn.
pub fn verify_tiling(spec: &MultigridSpec, center: &RealVector, radius: f64, n_samples: usize, seed: u64) -> Result<TilingReport, MultigridError> {
    validate_spec(spec)?;
    let a = affine_map_and_bound(spec);
    let max_diameter = AffineMap::max_tile_diameter(spec);
    let pad = a.bd_bound + max_diameter;
    let tiles = tiles_near(spec, center, radius + max_diameter)?;
    let grid = TileGrid::new(&tiles, max_diameter.max(1e-6));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut resampled = 0;
    let mut done = 0;
    while done < n_samples {
        let x = sample_ball(&mut rng, center, radius);
        let mut count = 0;
        let mut boundary = false;
        for &i in grid.candidates(&x) {
            let y = tiles[i].local_coords(&x);
            if y.iter().all(|&c| (-TOL..=1.0 + TOL).contains(&c)) {
                count += 1;
                boundary |= y.iter().any(|&c| !(TOL..=1.0 - TOL).contains(&c));
            }
        }
        if boundary {
            resampled += 1;
            continue;
        }
        match count {
            0 => return Err(MultigridError::GapDetected { witness: x.iter().copied().collect() }),
            1 => {}
            _ => return Err(MultigridError::OverlapDetected { witness: x.iter().copied().collect(), count }),
        }
        done += 1;
    }

    let d = spec.dim();
    let window = ball_volume(d, radius);
    let r2 = radius * radius;
    let mut inside = 0.0;
    let mut touching = 0.0;
    for t in &tiles {
        let vol = t.volume();
        if t.vertices().iter().all(|v| (v - center).norm_squared() <= r2) {
            inside += vol;
        }
        if (t.center() - center).norm() <= radius + 0.5 * max_diameter {
            touching += vol;
        }
    }
    let band = ball_volume(d, radius + pad) - ball_volume(d, (radius - pad).max(0.0));
    let band_ok = inside <= window + 1e-9 && window <= touching + 1e-9 && touching - inside <= band;
    Ok(TilingReport {
        tiles: tiles.len(),
        samples: n_samples,
        resampled,
        bd_bound: a.bd_bound,
        max_diameter,
        window_volume: window,
        inside_volume: inside,
        touching_volume: touching,
        band_ok,
    })
}
