//! Reading user point patterns.

use std::fs::File;
use std::path::Path;

use abc_shadow::io::{pattern_from_rows, read_pattern_rows, PatternRow};
use abc_shadow::prelude::*;
use serde::Serialize;
use std::result::Result;

use crate::error::CliError;

/// Affine map applied by `--normalize`: `x' = (x − x0) / scale`, same for `y`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Normalization {
    pub x0: f64,
    pub y0: f64,
    pub scale: f64,
}

/// Reads a `x,y[,angle]` CSV. With `normalize`, the bounding box is mapped
/// into `[0,1]²` by its longer side, keeping the aspect ratio; the window
/// argument is then ignored.
pub fn ingest_pattern(
    path: &Path,
    window: Option<Window>,
    normalize: bool,
) -> Result<(PointPattern, Option<Normalization>), CliError> {
    let file = File::open(path).map_err(|e| CliError::io(format!("cannot open pattern {}: {e}", path.display())))?;
    let rows = read_pattern_rows(file).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    if !normalize {
        let pattern = pattern_from_rows(&rows, window.unwrap_or_else(Window::unit_square))
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        return Ok((pattern, None));
    }
    if rows.is_empty() {
        return Err(CliError::input(format!("{}: cannot normalize an empty pattern", path.display())));
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for r in &rows {
        lo = [lo[0].min(r.x), lo[1].min(r.y)];
        hi = [hi[0].max(r.x), hi[1].max(r.y)];
    }
    let scale = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let map = Normalization { x0: lo[0], y0: lo[1], scale };
    let scaled: Vec<PatternRow> = rows
        .iter()
        .map(|r| PatternRow {
            x: ((r.x - map.x0) / scale).clamp(0.0, 1.0),
            y: ((r.y - map.y0) / scale).clamp(0.0, 1.0),
            ..*r
        })
        .collect();
    let pattern = pattern_from_rows(&scaled, Window::unit_square()).map_err(CliError::from)?;
    Ok((pattern, Some(map)))
}

/// `x0,y0,x1,y1`.
pub fn parse_window(s: &str) -> Result<Window, CliError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::config(format!("window {s:?} must be x0,y0,x1,y1")))?;
    if v.len() != 4 {
        return Err(CliError::config(format!("window {s:?} must have four numbers")));
    }
    Window::new([v[0], v[1]], [v[2], v[3]]).map_err(CliError::from)
}
