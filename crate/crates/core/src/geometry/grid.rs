use crate::space::{dist2, PointPattern, Window};

/// Bucket grid over a window. A query visits the 3×3 block of cells around
/// the query location, so it is exhaustive for any range up to the cell size.
#[derive(Clone, Debug)]
pub struct GridIndex {
    origin: [f64; 2],
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

const MAX_CELLS_PER_SIDE: f64 = 512.0;

impl GridIndex {
    pub fn new(window: &Window, cell: f64) -> Self {
        let side = window.width().max(window.height());
        let cell = cell.max(side / MAX_CELLS_PER_SIDE);
        let nx = ((window.width() / cell).ceil() as usize).max(1);
        let ny = ((window.height() / cell).ceil() as usize).max(1);
        GridIndex { origin: window.lower(), cell, nx, ny, buckets: vec![Vec::new(); nx * ny] }
    }

    pub fn build(window: &Window, cell: f64, locs: &[[f64; 2]]) -> Self {
        let mut g = GridIndex::new(window, cell);
        for (i, p) in locs.iter().enumerate() {
            g.insert(i, *p);
        }
        g
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    fn coords(&self, p: [f64; 2]) -> (isize, isize) {
        let cx = ((p[0] - self.origin[0]) / self.cell).floor() as isize;
        let cy = ((p[1] - self.origin[1]) / self.cell).floor() as isize;
        (cx.clamp(0, self.nx as isize - 1), cy.clamp(0, self.ny as isize - 1))
    }

    fn slot(&self, p: [f64; 2]) -> usize {
        let (cx, cy) = self.coords(p);
        cy as usize * self.nx + cx as usize
    }

    pub fn insert(&mut self, idx: usize, p: [f64; 2]) {
        let s = self.slot(p);
        self.buckets[s].push(idx);
    }

    pub fn remove(&mut self, idx: usize, p: [f64; 2]) {
        let s = self.slot(p);
        let bucket = &mut self.buckets[s];
        if let Some(pos) = bucket.iter().position(|&i| i == idx) {
            bucket.swap_remove(pos);
        }
    }

    /// Rename the entry `from` (stored at location `p`) to `to`.
    pub fn relabel(&mut self, from: usize, to: usize, p: [f64; 2]) {
        let s = self.slot(p);
        if let Some(e) = self.buckets[s].iter_mut().find(|i| **i == from) {
            *e = to;
        }
    }

    /// Calls `f` with every indexed entry in the 3×3 cell block around `p`.
    pub fn for_each_near(&self, p: [f64; 2], mut f: impl FnMut(usize)) {
        let (cx, cy) = self.coords(p);
        for y in (cy - 1).max(0)..=(cy + 1).min(self.ny as isize - 1) {
            for x in (cx - 1).max(0)..=(cx + 1).min(self.nx as isize - 1) {
                for &i in &self.buckets[y as usize * self.nx + x as usize] {
                    f(i);
                }
            }
        }
    }
}

/// Number of unordered pairs at distance strictly below `r`.
pub fn pair_count(pattern: &PointPattern, r: f64) -> usize {
    if pattern.len() < 2 || r <= 0.0 {
        return 0;
    }
    let locs = pattern.locations();
    let grid = GridIndex::build(pattern.window(), r, &locs);
    let r2 = r * r;
    let mut count = 0;
    for (i, p) in locs.iter().enumerate() {
        grid.for_each_near(*p, |j| {
            if j > i && dist2(*p, locs[j]) < r2 {
                count += 1;
            }
        });
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_count_small_cases() {
        let w = Window::unit_square();
        assert_eq!(pair_count(&PointPattern::empty(w), 0.1), 0);
        let line = PointPattern::from_xy(&[[0.1, 0.5], [0.15, 0.5], [0.2, 0.5]], w).unwrap();
        assert_eq!(pair_count(&line, 0.06), 2);
        assert_eq!(pair_count(&line, 0.2), 3);
        let pair = PointPattern::from_xy(&[[0.1, 0.1], [0.15, 0.1]], w).unwrap();
        assert_eq!(pair_count(&pair, 0.1), 1);
        // strict inequality
        assert_eq!(pair_count(&pair, 0.05 - 1e-12), 0);
    }

    #[test]
    fn relabel_and_remove() {
        let w = Window::unit_square();
        let mut g = GridIndex::build(&w, 0.2, &[[0.1, 0.1], [0.9, 0.9]]);
        g.relabel(1, 7, [0.9, 0.9]);
        let mut seen = vec![];
        g.for_each_near([0.95, 0.95], |i| seen.push(i));
        assert_eq!(seen, vec![7]);
        g.remove(7, [0.9, 0.9]);
        seen.clear();
        g.for_each_near([0.95, 0.95], |i| seen.push(i));
        assert!(seen.is_empty());
    }
}
