//! OFF meshes for polyhedra and SVG paths for polygons.

use std::fmt::Write;

use super::{ConvexPolytope, GeomError};

/// Fixed decimal precision of every exported number.
pub const PRECISION: usize = 9;

pub fn fmt_num(x: f64) -> String {
    let s = format!("{:.*}", PRECISION, x);
    // avoid "-0.000000000"
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

/// OFF text: header `OFF\n<nv> <nf> <ne>`, vertex lines, then face rings.
pub fn to_off(p: &ConvexPolytope) -> Result<String, GeomError> {
    if p.dim() != 3 {
        return Err(GeomError::UnsupportedDimension(p.dim()));
    }
    let mut out = String::new();
    writeln!(out, "OFF").unwrap();
    writeln!(out, "{} {} {}", p.n_vertices(), p.n_facets(), p.n_edges()).unwrap();
    for v in p.vertices() {
        writeln!(out, "{} {} {}", fmt_num(v[0]), fmt_num(v[1]), fmt_num(v[2])).unwrap();
    }
    for f in p.facets() {
        let ring: Vec<String> = f.vertices.iter().map(|i| i.to_string()).collect();
        writeln!(out, "{} {}", f.vertices.len(), ring.join(" ")).unwrap();
    }
    Ok(out)
}

/// Closed SVG path data `M x y L ... Z` for a polygon.
pub fn to_svg_path(p: &ConvexPolytope) -> Result<String, GeomError> {
    if p.dim() != 2 {
        return Err(GeomError::UnsupportedDimension(p.dim()));
    }
    let v = p.vertices();
    let mut out = String::new();
    for (k, i) in p.ring().into_iter().enumerate() {
        let cmd = if k == 0 { "M" } else { " L" };
        write!(out, "{cmd} {} {}", fmt_num(v[i][0]), fmt_num(v[i][1])).unwrap();
    }
    out.push_str(" Z");
    Ok(out)
}

/// Standalone SVG document showing one polygon. The y axis is flipped so the
/// picture has the usual orientation.
pub fn to_svg_document(p: &ConvexPolytope) -> Result<String, GeomError> {
    let path = to_svg_path(p)?;
    let (lo, hi) = p.bounds();
    let pad = 0.05 * (hi[0] - lo[0]).max(hi[1] - lo[1]);
    Ok(format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">\n<g transform=\"scale(1,-1)\">\n<path d=\"{}\" fill=\"#9ab\" stroke=\"#234\" stroke-width=\"{}\"/>\n</g>\n</svg>\n",
        fmt_num(lo[0] - pad),
        fmt_num(-hi[1] - pad),
        fmt_num(hi[0] - lo[0] + 2.0 * pad),
        fmt_num(hi[1] - lo[1] + 2.0 * pad),
        path,
        fmt_num(pad * 0.2)
    ))
}
