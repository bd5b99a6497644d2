//! Area of a union of disks clipped to the window, by midpoint quadrature.

use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::space::{PointPattern, Window};

/// Per-cell disk coverage counts on a midpoint grid over the window.
///
/// The covered area is the number of cells whose midpoint lies in at least
/// one disk, times the cell area. Adding or removing a disk touches only the
/// cells of its bounding box, which makes the grid usable inside samplers.
#[derive(Clone, Debug)]
pub struct CoverageGrid {
    origin: [f64; 2],
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
    counts: Vec<u16>,
    covered: usize,
}

impl CoverageGrid {
    /// Grid with cells no larger than `resolution` on either side.
    pub fn new(window: &Window, resolution: f64) -> Result<Self> {
        if !(resolution > 0.0 && resolution.is_finite()) {
            return invalid(format!("resolution must be positive, got {resolution}"));
        }
        let nx = (window.width() / resolution).ceil() as usize;
        let ny = (window.height() / resolution).ceil() as usize;
        if nx.saturating_mul(ny) > 64_000_000 {
            return invalid(format!("resolution {resolution} needs {nx}x{ny} cells"));
        }
        Ok(CoverageGrid {
            origin: window.lower(),
            nx,
            ny,
            hx: window.width() / nx as f64,
            hy: window.height() / ny as f64,
            counts: vec![0; nx * ny],
            covered: 0,
        })
    }

    pub fn cell_area(&self) -> f64 {
        self.hx * self.hy
    }

    pub fn covered_cells(&self) -> usize {
        self.covered
    }

    pub fn covered_area(&self) -> f64 {
        self.covered as f64 * self.cell_area()
    }

    fn for_each_cell_in_disk(&self, c: [f64; 2], r: f64, mut f: impl FnMut(usize)) {
        let r2 = r * r;
        let i0 = (((c[0] - r - self.origin[0]) / self.hx - 0.5).ceil().max(0.0)) as usize;
        let i1 = (((c[0] + r - self.origin[0]) / self.hx - 0.5).floor()).min(self.nx as f64 - 1.0);
        let j0 = (((c[1] - r - self.origin[1]) / self.hy - 0.5).ceil().max(0.0)) as usize;
        let j1 = (((c[1] + r - self.origin[1]) / self.hy - 0.5).floor()).min(self.ny as f64 - 1.0);
        if i1 < 0.0 || j1 < 0.0 {
            return;
        }
        let (i1, j1) = (i1 as usize, j1 as usize);
        for j in j0..=j1 {
            let dy = self.origin[1] + (j as f64 + 0.5) * self.hy - c[1];
            let rem = r2 - dy * dy;
            if rem < 0.0 {
                continue;
            }
            let row = j * self.nx;
            for i in i0..=i1 {
                let dx = self.origin[0] + (i as f64 + 0.5) * self.hx - c[0];
                if dx * dx <= rem {
                    f(row + i);
                }
            }
        }
    }

    /// Cells that adding the disk would newly cover.
    pub fn gain_if_added(&self, c: [f64; 2], r: f64) -> usize {
        let mut n = 0;
        self.for_each_cell_in_disk(c, r, |k| n += (self.counts[k] == 0) as usize);
        n
    }

    /// Cells that removing the disk would uncover (the disk must be present).
    pub fn loss_if_removed(&self, c: [f64; 2], r: f64) -> usize {
        let mut n = 0;
        self.for_each_cell_in_disk(c, r, |k| n += (self.counts[k] == 1) as usize);
        n
    }

    pub fn add_disk(&mut self, c: [f64; 2], r: f64) -> usize {
        let mut cells = Vec::new();
        self.for_each_cell_in_disk(c, r, |k| cells.push(k));
        let mut gained = 0;
        for k in cells {
            if self.counts[k] == 0 {
                gained += 1;
            }
            self.counts[k] += 1;
        }
        self.covered += gained;
        gained
    }

    pub fn remove_disk(&mut self, c: [f64; 2], r: f64) -> usize {
        let mut cells = Vec::new();
        self.for_each_cell_in_disk(c, r, |k| cells.push(k));
        let mut lost = 0;
        for k in cells {
            debug_assert!(self.counts[k] > 0, "removing a disk that was never added");
            self.counts[k] -= 1;
            if self.counts[k] == 0 {
                lost += 1;
            }
        }
        self.covered -= lost;
        lost
    }
}

pub(crate) fn check_union_args(r: f64, resolution: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return invalid(format!("disk radius must be positive, got {r}"));
    }
    if !(resolution > 0.0) || resolution > r / 10.0 * (1.0 + 1e-12) {
        return invalid(format!("resolution {resolution} too coarse for radius {r} (need <= r/10)"));
    }
    Ok(())
}

/// Area of `(∪ b(w_i, r)) ∩ W` on a midpoint grid of cell size ≤ `resolution`.
pub fn union_disks_area(pattern: &PointPattern, r: f64, window: &Window, resolution: f64) -> Result<f64> {
    check_union_args(r, resolution)?;
    if pattern.is_empty() {
        return Ok(0.0);
    }
    let mut grid = CoverageGrid::new(window, resolution)?;
    for p in pattern.points() {
        grid.add_disk(p.loc, r);
    }
    Ok(grid.covered_area())
}

/// `a_r = -area / (π r²)`.
pub fn area_statistic(pattern: &PointPattern, r: f64, window: &Window, resolution: f64) -> Result<f64> {
    let area = union_disks_area(pattern, r, window, resolution)?;
    Ok(-area / (PI * r * r))
}
