//! Candy-model segment interactions.
//!
//! A segment is its centre, an orientation in `[0, π)` and the model's fixed
//! length. Two segments are connected when exactly one pair of their
//! endpoints is closer than the connection range and their orientations
//! differ by less than the connection curvature. A pair is a rejection pair
//! when the centres are closer than the rejection range and the orientations
//! are further than the rejection curvature from orthogonality.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::models::CandyParams;
use crate::space::{dist2, MarkedPoint, PointPattern};

use super::grid::GridIndex;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub center: [f64; 2],
    pub angle: f64,
    pub length: f64,
}

impl Segment {
    pub fn from_point(p: &MarkedPoint, length: f64) -> Option<Segment> {
        p.angle.map(|angle| Segment { center: p.loc, angle, length })
    }

    pub fn endpoints(&self) -> [[f64; 2]; 2] {
        let h = 0.5 * self.length;
        let (s, c) = self.angle.sin_cos();
        [[self.center[0] + h * c, self.center[1] + h * s], [self.center[0] - h * c, self.center[1] - h * s]]
    }
}

/// Circular distance between two orientations in `[0, π)`.
pub fn orientation_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs() % PI;
    d.min(PI - d)
}

/// Endpoint indices `(end of a, end of b)` through which `a` and `b` connect.
pub fn connection(a: &Segment, b: &Segment, rc: f64, tau_c: f64) -> Option<(usize, usize)> {
    if orientation_distance(a.angle, b.angle) >= tau_c {
        return None;
    }
    let (ea, eb) = (a.endpoints(), b.endpoints());
    let rc2 = rc * rc;
    let mut found = None;
    for (i, pa) in ea.iter().enumerate() {
        for (j, pb) in eb.iter().enumerate() {
            if dist2(*pa, *pb) < rc2 {
                if found.is_some() {
                    return None;
                }
                found = Some((i, j));
            }
        }
    }
    found
}

/// Close, far-from-orthogonal pair predicate.
pub fn rejects(a: &Segment, b: &Segment, rr: f64, tau_r: f64) -> bool {
    dist2(a.center, b.center) < rr * rr && orientation_distance(a.angle, b.angle) < FRAC_PI_2 - tau_r
}

/// `(n_d, n_s, n_f, n_r)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CandyCounts {
    pub doubly: usize,
    pub singly: usize,
    pub free: usize,
    pub rejecting: usize,
}

impl CandyCounts {
    pub fn as_vec(&self) -> Vec<f64> {
        vec![self.doubly as f64, self.singly as f64, self.free as f64, self.rejecting as f64]
    }
}

pub(crate) fn segments_of(pattern: &PointPattern, length: f64) -> Result<Vec<Segment>> {
    pattern
        .points()
        .iter()
        .enumerate()
        .map(|(i, p)| match Segment::from_point(p, length) {
            Some(s) => Ok(s),
            None => invalid(format!("candy statistics need an orientation on every point (point {i} has none)")),
        })
        .collect()
}

/// Grid index cell size covering every Candy interaction.
pub(crate) fn candy_reach(params: &CandyParams) -> f64 {
    (params.length + params.connect_range).max(params.reject_range)
}

pub fn candy_counts(pattern: &PointPattern, params: &CandyParams) -> Result<CandyCounts> {
    let segs = segments_of(pattern, params.length)?;
    let centers: Vec<[f64; 2]> = segs.iter().map(|s| s.center).collect();
    let grid = GridIndex::build(pattern.window(), candy_reach(params), &centers);
    let mut linked = vec![[false; 2]; segs.len()];
    let mut counts = CandyCounts::default();
    for (i, s) in segs.iter().enumerate() {
        grid.for_each_near(s.center, |j| {
            if j <= i {
                return;
            }
            let t = &segs[j];
            if let Some((ei, ej)) = connection(s, t, params.connect_range, params.connect_curvature) {
                linked[i][ei] = true;
                linked[j][ej] = true;
            }
            if rejects(s, t, params.reject_range, params.reject_curvature) {
                counts.rejecting += 1;
            }
        });
    }
    for l in &linked {
        match (l[0], l[1]) {
            (true, true) => counts.doubly += 1,
            (false, false) => counts.free += 1,
            _ => counts.singly += 1,
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Window;

    fn params() -> CandyParams {
        CandyParams {
            length: 0.12,
            connect_range: 0.01,
            connect_curvature: 0.5,
            reject_range: 0.12,
            reject_curvature: 0.5,
        }
    }

    fn pattern(segs: &[(f64, f64, f64)]) -> PointPattern {
        let w = Window::rect(3.0, 1.0).unwrap();
        PointPattern::new(segs.iter().map(|&(x, y, a)| MarkedPoint::with_angle(x, y, a)).collect(), w).unwrap()
    }

    #[test]
    fn endpoints_are_one_length_apart() {
        let s = Segment { center: [1.0, 0.5], angle: 0.7, length: 0.12 };
        let [a, b] = s.endpoints();
        assert!((dist2(a, b).sqrt() - 0.12).abs() < 1e-12);
    }

    #[test]
    fn orientation_metric_is_circular() {
        assert!((orientation_distance(0.1, PI - 0.1) - 0.2).abs() < 1e-12);
        assert!((orientation_distance(0.0, FRAC_PI_2) - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn empty_pattern_counts_zero() {
        assert_eq!(candy_counts(&pattern(&[]), &params()).unwrap(), CandyCounts::default());
    }

    #[test]
    fn end_to_end_pair_is_singly_connected() {
        // Gap 0.005 between facing endpoints; centres 0.125 apart, beyond r_r.
        let c = candy_counts(&pattern(&[(1.0, 0.5, 0.0), (1.125, 0.5, 0.0)]), &params()).unwrap();
        assert_eq!((c.doubly, c.singly, c.free, c.rejecting), (0, 2, 0, 0));
    }

    #[test]
    fn chain_of_three_has_doubly_connected_middle() {
        let c = candy_counts(&pattern(&[(1.0, 0.5, 0.0), (1.125, 0.5, 0.0), (1.25, 0.5, 0.0)]), &params()).unwrap();
        assert_eq!((c.doubly, c.singly, c.free, c.rejecting), (1, 2, 0, 0));
    }

    #[test]
    fn misaligned_segments_do_not_connect() {
        let c = candy_counts(&pattern(&[(1.0, 0.5, 0.0), (1.125, 0.5, 0.6)]), &params()).unwrap();
        assert_eq!((c.singly, c.free), (0, 2));
    }

    #[test]
    fn rejection_needs_closeness_and_non_orthogonality() {
        let p = params();
        let near_parallel = candy_counts(&pattern(&[(1.0, 0.5, 0.0), (1.0, 0.55, 0.3)]), &p).unwrap();
        assert_eq!(near_parallel.rejecting, 1);
        let orthogonal = candy_counts(&pattern(&[(1.0, 0.5, 0.0), (1.0, 0.55, FRAC_PI_2)]), &p).unwrap();
        assert_eq!(orthogonal.rejecting, 0);
        let far = candy_counts(&pattern(&[(1.0, 0.5, 0.0), (1.0, 0.7, 0.0)]), &p).unwrap();
        assert_eq!(far.rejecting, 0);
    }

    #[test]
    fn unmarked_points_are_rejected() {
        let w = Window::unit_square();
        let p = PointPattern::from_xy(&[[0.5, 0.5]], w).unwrap();
        assert!(candy_counts(&p, &params()).is_err());
    }
}
