//! SVG rendering of planar tilings and line-delimited tile records.

use std::fmt::Write;

use super::{MultigridSpec, Tile};
use crate::geom::export::fmt_num;

const PALETTE: [&str; 10] = ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"];

fn join_nums<'a>(xs: impl Iterator<Item = &'a f64>) -> String {
    xs.map(|x| fmt_num(*x)).collect::<Vec<_>>().join(",")
}

/// One polygon per tile, filled by the index of its subset J. Only d = 2.
pub fn tiles_to_svg(spec: &MultigridSpec, tiles: &[Tile]) -> Option<String> {
    if spec.dim() != 2 {
        return None;
    }
    let subsets = spec.subsets();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for t in tiles {
        for v in t.vertices() {
            for a in 0..2 {
                lo[a] = lo[a].min(v[a]);
                hi[a] = hi[a].max(v[a]);
            }
        }
    }
    if tiles.is_empty() {
        lo = [0.0; 2];
        hi = [1.0; 2];
    }
    let mut s = String::new();
    writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">",
        fmt_num(lo[0]),
        fmt_num(-hi[1]),
        fmt_num(hi[0] - lo[0]),
        fmt_num(hi[1] - lo[1])
    )
    .unwrap();
    for t in tiles {
        let class = subsets.iter().position(|j| *j == t.j).unwrap_or(0);
        let v = t.vertices();
        // corners in boundary order: 0, g0, g0+g1, g1; y flipped for screen coordinates
        let ring: Vec<String> = [0, 1, 3, 2].iter().map(|&i| format!("{},{}", fmt_num(v[i][0]), fmt_num(-v[i][1]))).collect();
        writeln!(
            s,
            "<polygon data-j=\"{}\" points=\"{}\" fill=\"{}\" stroke=\"#222222\" stroke-width=\"0.02\"/>",
            t.j.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(","),
            ring.join(" "),
            PALETTE[class % PALETTE.len()]
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    Some(s)
}

/// One JSON object per line: {"J":[..],"k":[..],"anchor":[..],"generators":[[..],..]}.
pub fn tile_records(tiles: &[Tile]) -> String {
    let mut s = String::new();
    for t in tiles {
        let gens: Vec<String> = t.generators.iter().map(|g| format!("[{}]", join_nums(g.iter()))).collect();
        writeln!(
            s,
            "{{\"J\":[{}],\"k\":[{}],\"anchor\":[{}],\"generators\":[{}]}}",
            t.j.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(","),
            t.k.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(","),
            join_nums(t.anchor.iter()),
            gens.join(",")
        )
        .unwrap();
    }
    s
}
