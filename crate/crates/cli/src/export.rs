use std::path::Path;

use wulffgrid::geom::export::{to_off, to_svg_document};
use wulffgrid::WulffShape;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Svg,
    Off,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Svg => "svg",
            Format::Off => "off",
        }
    }

    pub fn from_path(p: &Path) -> Option<Self> {
        match p.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(Format::Csv),
            "svg" => Some(Format::Svg),
            "off" => Some(Format::Off),
            _ => None,
        }
    }
}

/// OFF for polyhedra, SVG for polygons.
pub fn export_wulff(w: &WulffShape, format: Format) -> Result<String, CliError> {
    let d = w.body.dim();
    let mismatch = || CliError::FormatMismatch { artifact: format!("{d}-dimensional Wulff shape"), format: format.extension().into() };
    let p = w.body.as_polytope().filter(|_| !w.degenerate).ok_or_else(|| CliError::FormatMismatch {
        artifact: "degenerate Wulff shape".into(),
        format: format.extension().into(),
    })?;
    match (format, d) {
        (Format::Off, 3) => Ok(to_off(p)?),
        (Format::Svg, 2) => Ok(to_svg_document(p)?),
        _ => Err(mismatch()),
    }
}
