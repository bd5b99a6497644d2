//! Observation windows and (marked) point patterns in the plane.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Axis-aligned rectangle `[lower[0], upper[0]] × [lower[1], upper[1]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWindow")]
pub struct Window {
    lower: [f64; 2],
    upper: [f64; 2],
}

#[derive(Deserialize)]
struct RawWindow {
    lower: [f64; 2],
    upper: [f64; 2],
}

impl TryFrom<RawWindow> for Window {
    type Error = crate::Error;

    fn try_from(raw: RawWindow) -> Result<Self> {
        Window::new(raw.lower, raw.upper)
    }
}

impl Window {
    pub fn new(lower: [f64; 2], upper: [f64; 2]) -> Result<Self> {
        for i in 0..2 {
            if !(lower[i].is_finite() && upper[i].is_finite()) {
                return invalid(format!("window corner not finite: {lower:?} {upper:?}"));
            }
            if upper[i] <= lower[i] {
                return invalid(format!("window upper[{i}]={} must exceed lower[{i}]={}", upper[i], lower[i]));
            }
        }
        Ok(Window { lower, upper })
    }

    pub fn unit_square() -> Self {
        Window { lower: [0.0, 0.0], upper: [1.0, 1.0] }
    }

    pub fn rect(width: f64, height: f64) -> Result<Self> {
        Window::new([0.0, 0.0], [width, height])
    }

    pub fn lower(&self) -> [f64; 2] {
        self.lower
    }

    pub fn upper(&self) -> [f64; 2] {
        self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper[0] - self.lower[0]
    }

    pub fn height(&self) -> f64 {
        self.upper[1] - self.lower[1]
    }

    pub fn volume(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn shortest_side(&self) -> f64 {
        self.width().min(self.height())
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.lower[0] && p[0] <= self.upper[0] && p[1] >= self.lower[1] && p[1] <= self.upper[1]
    }

    /// Distance from an interior point to the window boundary.
    pub fn boundary_distance(&self, p: [f64; 2]) -> f64 {
        let dx = (p[0] - self.lower[0]).min(self.upper[0] - p[0]);
        let dy = (p[1] - self.lower[1]).min(self.upper[1] - p[1]);
        dx.min(dy)
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 2] {
        [self.lower[0] + self.width() * rng.random::<f64>(), self.lower[1] + self.height() * rng.random::<f64>()]
    }
}

/// A location with an optional orientation mark in `[0, π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkedPoint {
    pub loc: [f64; 2],
    pub angle: Option<f64>,
}

impl MarkedPoint {
    pub fn new(x: f64, y: f64) -> Self {
        MarkedPoint { loc: [x, y], angle: None }
    }

    pub fn with_angle(x: f64, y: f64, angle: f64) -> Self {
        MarkedPoint { loc: [x, y], angle: Some(wrap_angle(angle)) }
    }
}

/// Reduce an orientation to `[0, π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(PI);
    if w >= PI {
        0.0
    } else {
        w
    }
}

#[inline]
pub fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

/// A finite configuration of marked points inside a window.
#[derive(Clone, Debug, PartialEq)]
pub struct PointPattern {
    points: Vec<MarkedPoint>,
    window: Window,
}

impl PointPattern {
    pub fn new(points: Vec<MarkedPoint>, window: Window) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            if !window.contains(p.loc) {
                return invalid(format!("point {i} at {:?} lies outside the window", p.loc));
            }
            if let Some(a) = p.angle {
                if !(0.0..PI).contains(&a) {
                    return invalid(format!("point {i} orientation {a} outside [0, pi)"));
                }
            }
        }
        Ok(PointPattern { points, window })
    }

    pub fn empty(window: Window) -> Self {
        PointPattern { points: Vec::new(), window }
    }

    /// Unmarked pattern from bare coordinates.
    pub fn from_xy(xy: &[[f64; 2]], window: Window) -> Result<Self> {
        PointPattern::new(xy.iter().map(|p| MarkedPoint::new(p[0], p[1])).collect(), window)
    }

    pub(crate) fn from_trusted(points: Vec<MarkedPoint>, window: Window) -> Self {
        PointPattern { points, window }
    }

    pub fn points(&self) -> &[MarkedPoint] {
        &self.points
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn locations(&self) -> Vec<[f64; 2]> {
        self.points.iter().map(|p| p.loc).collect()
    }

    pub fn is_marked(&self) -> bool {
        !self.points.is_empty() && self.points.iter().all(|p| p.angle.is_some())
    }

    /// Binomial process: `n` independent uniform locations.
    pub fn binomial<R: Rng + ?Sized>(n: usize, window: Window, rng: &mut R) -> Self {
        let points = (0..n)
            .map(|_| {
                let p = window.sample_uniform(rng);
                MarkedPoint::new(p[0], p[1])
            })
            .collect();
        PointPattern { points, window }
    }
}
