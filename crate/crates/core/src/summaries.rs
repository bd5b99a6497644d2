//! K, F, G and J summary functions with fixed-border corrections, their
//! Poisson forms, and pointwise Monte Carlo envelopes.
//!
//! All estimators erode the window by the largest `u` of the grid, so every
//! curve is computed from the same reference set and is monotone in `u`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::GridIndex;
use crate::rng::RngState;
use crate::space::{dist2, PointPattern, Window};

/// Side of the deterministic test-location grid used by `F̂`.
pub const F_GRID: usize = 128;

/// Strictly increasing, positive distances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct UGrid(Vec<f64>);

impl TryFrom<Vec<f64>> for UGrid {
    type Error = crate::Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        UGrid::new(v)
    }
}

impl From<UGrid> for Vec<f64> {
    fn from(g: UGrid) -> Vec<f64> {
        g.0
    }
}

impl UGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return invalid("u grid is empty");
        }
        if !values.iter().all(|u| u.is_finite() && *u > 0.0) {
            return invalid("u grid values must be positive and finite");
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("u grid must be strictly increasing");
        }
        Ok(UGrid(values))
    }

    /// `k` equally spaced values from `lo` to `hi` inclusive.
    pub fn linspace(lo: f64, hi: f64, k: usize) -> Result<Self> {
        if k < 2 {
            return UGrid::new(vec![hi]);
        }
        UGrid::new((0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> f64 {
        *self.0.last().expect("grid is non-empty")
    }

    fn check_window(&self, window: &Window) -> Result<()> {
        if self.max() > window.shortest_side() / 4.0 {
            return invalid(format!(
                "u grid reaches {} but must stay within a quarter of the shortest window side ({})",
                self.max(),
                window.shortest_side() / 4.0
            ));
        }
        Ok(())
    }
}

/// One summary function on a grid; `NaN` marks undefined values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryCurve {
    pub u: Vec<f64>,
    pub values: Vec<f64>,
}

/// The four summary functions, in the order K, F, G, J.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summaries {
    pub k: SummaryCurve,
    pub f: SummaryCurve,
    pub g: SummaryCurve,
    pub j: SummaryCurve,
}

pub const STAT_NAMES: [&str; 4] = ["K", "F", "G", "J"];

impl Summaries {
    pub fn curves(&self) -> [&SummaryCurve; 4] {
        [&self.k, &self.f, &self.g, &self.j]
    }
}

/// Fraction of sorted distances `≤ u`, for each `u`.
fn cumulative(sorted: &[f64], u: &[f64], denom: f64) -> Vec<f64> {
    u.iter().map(|&u| sorted.partition_point(|d| *d <= u) as f64 / denom).collect()
}

/// Distance from `p` to the nearest location, or `∞` if none is within the
/// index cell size.
fn nearest_within(index: &GridIndex, locs: &[[f64; 2]], p: [f64; 2], skip: Option<usize>) -> f64 {
    let mut best = f64::INFINITY;
    index.for_each_near(p, |j| {
        if Some(j) != skip {
            best = best.min(dist2(p, locs[j]));
        }
    });
    let reach = index.cell_size();
    if best <= reach * reach {
        best.sqrt()
    } else {
        f64::INFINITY
    }
}

/// Reduced-sample `F̂` over the eroded test grid. Defined for empty patterns.
pub fn estimate_f(pattern: &PointPattern, grid: &UGrid) -> Result<SummaryCurve> {
    let w = pattern.window();
    grid.check_window(w)?;
    let b = grid.max();
    let locs = pattern.locations();
    let index = GridIndex::build(w, b, &locs);
    let (hx, hy) = (w.width() / F_GRID as f64, w.height() / F_GRID as f64);
    let mut dists = Vec::new();
    let mut n_test = 0usize;
    for i in 0..F_GRID {
        for j in 0..F_GRID {
            let p = [w.lower()[0] + (i as f64 + 0.5) * hx, w.lower()[1] + (j as f64 + 0.5) * hy];
            if w.boundary_distance(p) < b {
                continue;
            }
            n_test += 1;
            let d = nearest_within(&index, &locs, p, None);
            if d.is_finite() {
                dists.push(d);
            }
        }
    }
    if n_test == 0 {
        return invalid("no test locations remain after erosion");
    }
    dists.sort_by(f64::total_cmp);
    Ok(SummaryCurve { u: grid.values().to_vec(), values: cumulative(&dists, grid.values(), n_test as f64) })
}

/// Border-corrected `K̂`, `F̂`, `Ĝ` and `Ĵ = (1 − Ĝ)/(1 − F̂)`.
///
/// `K̂` is scaled by `n(n−1)/ν(W)²` times the eroded area. With fewer than
/// two points `Ĝ` and `Ĵ` are undefined; with none the call fails.
pub fn estimate_summaries(pattern: &PointPattern, grid: &UGrid) -> Result<Summaries> {
    if pattern.is_empty() {
        return invalid("K and G are undefined for an empty pattern");
    }
    let w = pattern.window();
    grid.check_window(w)?;
    let f = estimate_f(pattern, grid)?;
    let b = grid.max();
    let u = grid.values();
    let locs = pattern.locations();
    let n = locs.len();
    let index = GridIndex::build(w, b, &locs);

    let interior: Vec<usize> = (0..n).filter(|&i| w.boundary_distance(locs[i]) >= b).collect();
    let mut pair_d = Vec::new();
    let mut nn_d = Vec::new();
    for &i in &interior {
        index.for_each_near(locs[i], |j| {
            if j != i {
                let d = dist2(locs[i], locs[j]).sqrt();
                if d <= b {
                    pair_d.push(d);
                }
            }
        });
        nn_d.push(nearest_within(&index, &locs, locs[i], Some(i)));
    }
    pair_d.sort_by(f64::total_cmp);
    nn_d.sort_by(f64::total_cmp);

    let nan = vec![f64::NAN; u.len()];
    let eroded = (w.width() - 2.0 * b) * (w.height() - 2.0 * b);
    let k_vals = if n >= 2 && !interior.is_empty() {
        let lambda2 = (n * (n - 1)) as f64 / (w.volume() * w.volume());
        cumulative(&pair_d, u, lambda2 * eroded)
    } else if n < 2 {
        vec![0.0; u.len()]
    } else {
        nan.clone()
    };
    let g_vals = if n >= 2 && !interior.is_empty() { cumulative(&nn_d, u, interior.len() as f64) } else { nan };
    let j_vals = g_vals
        .iter()
        .zip(&f.values)
        .map(|(g, f)| if *f < 1.0 && g.is_finite() { (1.0 - g) / (1.0 - f) } else { f64::NAN })
        .collect();
    let curve = |values| SummaryCurve { u: u.to_vec(), values };
    Ok(Summaries { k: curve(k_vals), f, g: curve(g_vals), j: curve(j_vals) })
}

/// Stationary Poisson forms: `K = πu²`, `F = G = 1 − exp(−λπu²)`, `J = 1`.
pub fn poisson_theoretical(lambda: f64, u: &[f64]) -> Result<Summaries> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return invalid(format!("intensity must be positive, got {lambda}"));
    }
    if u.iter().any(|u| !(*u >= 0.0)) {
        return invalid("distances must be non-negative");
    }
    let curve = |f: &dyn Fn(f64) -> f64| SummaryCurve { u: u.to_vec(), values: u.iter().map(|&u| f(u)).collect() };
    let fg = |u: f64| 1.0 - (-lambda * PI * u * u).exp();
    Ok(Summaries { k: curve(&|u| PI * u * u), f: curve(&fg), g: curve(&fg), j: curve(&|_| 1.0) })
}

/// Observed curve against its simulation envelope for one statistic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeCurve {
    pub statistic: String,
    pub u: Vec<f64>,
    pub observed: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub theoretical: Vec<f64>,
    /// Observed value within `[lower, upper]`. Undefined observations count as inside.
    pub inside: Vec<bool>,
}

impl EnvelopeCurve {
    pub fn fraction_inside(&self) -> f64 {
        self.inside.iter().filter(|b| **b).count() as f64 / self.inside.len() as f64
    }

    /// Whether the observed curve rises above the upper envelope anywhere.
    pub fn exits_above(&self) -> bool {
        self.observed.iter().zip(&self.upper).any(|(o, up)| o > up)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeResult {
    pub n_sim: usize,
    pub lambda: f64,
    pub curves: Vec<EnvelopeCurve>,
}

impl EnvelopeResult {
    pub fn curve(&self, statistic: &str) -> Option<&EnvelopeCurve> {
        self.curves.iter().find(|c| c.statistic == statistic)
    }
}

/// Pointwise min/max envelopes from `n_sim` binomial patterns with the
/// observed point count. Replicate `i` uses stream `rng.fork(i)`, so the
/// result does not depend on the thread count.
pub fn envelope_test(pattern: &PointPattern, n_sim: usize, grid: &UGrid, rng: &RngState) -> Result<EnvelopeResult> {
    if n_sim < 2 {
        return invalid(format!("envelopes need at least 2 simulations, got {n_sim}"));
    }
    let w = *pattern.window();
    let n = pattern.len();
    let observed = estimate_summaries(pattern, grid)?;
    let lambda = n as f64 / w.volume();
    let theory = poisson_theoretical(lambda, grid.values())?;
    let sims = (0..n_sim)
        .into_par_iter()
        .map(|i| estimate_summaries(&PointPattern::binomial(n, w, &mut rng.fork(i as u64)), grid))
        .collect::<Result<Vec<_>>>()?;

    let mut curves = Vec::with_capacity(4);
    for (s, name) in STAT_NAMES.iter().enumerate() {
        let obs = observed.curves()[s];
        let k = obs.u.len();
        let (mut lo, mut hi) = (vec![f64::NAN; k], vec![f64::NAN; k]);
        for sim in &sims {
            for (i, v) in sim.curves()[s].values.iter().enumerate() {
                if v.is_finite() {
                    lo[i] = if lo[i].is_nan() { *v } else { lo[i].min(*v) };
                    hi[i] = if hi[i].is_nan() { *v } else { hi[i].max(*v) };
                }
            }
        }
        let inside =
            obs.values.iter().zip(lo.iter().zip(&hi)).map(|(o, (l, h))| !o.is_finite() || (o >= l && o <= h)).collect();
        curves.push(EnvelopeCurve {
            statistic: name.to_string(),
            u: obs.u.clone(),
            observed: obs.values.clone(),
            lower: lo,
            upper: hi,
            theoretical: theory.curves()[s].values.clone(),
            inside,
        });
    }
    Ok(EnvelopeResult { n_sim, lambda, curves })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::MarkedPoint;

    fn grid() -> UGrid {
        UGrid::linspace(0.01, 0.1, 10).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(UGrid::new(vec![]).is_err());
        assert!(UGrid::new(vec![0.0, 0.1]).is_err());
        assert!(UGrid::new(vec![0.1, 0.1]).is_err());
        let p = PointPattern::from_xy(&[[0.5, 0.5]], Window::unit_square()).unwrap();
        assert!(estimate_summaries(&p, &UGrid::new(vec![0.1, 0.3]).unwrap()).is_err());
    }

    #[test]
    fn poisson_forms() {
        let s = poisson_theoretical(163.0, &[0.0, 0.05, 0.1]).unwrap();
        assert_eq!(s.k.values[0], 0.0);
        assert_eq!(s.f.values[0], 0.0);
        assert_eq!(s.j.values[0], 1.0);
        assert_eq!(s.f.values[1], 1.0 - (-163.0 * PI * 0.0025f64).exp());
        assert!((s.k.values[2] - 0.031415926535897934).abs() < 1e-15);
        assert_eq!(s.f.values, s.g.values);
        assert!(poisson_theoretical(0.0, &[0.1]).is_err());
    }

    #[test]
    fn empty_pattern_has_only_f() {
        let p = PointPattern::empty(Window::unit_square());
        assert!(estimate_summaries(&p, &grid()).is_err());
        let f = estimate_f(&p, &grid()).unwrap();
        assert!(f.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn single_point_f_is_disk_fraction() {
        let p = PointPattern::new(vec![MarkedPoint::new(0.5, 0.5)], Window::unit_square()).unwrap();
        let s = estimate_summaries(&p, &grid()).unwrap();
        assert!(s.g.values.iter().all(|v| v.is_nan()));
        let eroded = 0.8 * 0.8;
        for (u, f) in s.f.u.iter().zip(&s.f.values) {
            let expect = PI * u * u / eroded;
            assert!(
                (f - expect).abs() < 0.1 * expect + 2.0 / (F_GRID * F_GRID) as f64 / eroded * 4.0,
                "u={u} F={f} vs {expect}"
            );
        }
    }

    #[test]
    fn curves_are_monotone_and_bounded() {
        let mut rng = RngState::new(11, 0);
        for _ in 0..10 {
            let p = PointPattern::binomial(100, Window::unit_square(), &mut rng);
            let s = estimate_summaries(&p, &grid()).unwrap();
            for c in [&s.k, &s.f, &s.g] {
                assert!(c.values.windows(2).all(|w| w[1] >= w[0]));
            }
            for c in [&s.f, &s.g] {
                assert!(c.values.iter().all(|v| (0.0..=1.0).contains(v)));
            }
        }
    }

    #[test]
    fn two_simulation_envelope_is_their_min_max() {
        let mut rng = RngState::new(12, 0);
        let p = PointPattern::binomial(50, Window::unit_square(), &mut rng);
        let env = envelope_test(&p, 2, &grid(), &RngState::new(13, 0)).unwrap();
        let sims: Vec<Summaries> = (0..2)
            .map(|i| {
                estimate_summaries(
                    &PointPattern::binomial(50, Window::unit_square(), &mut RngState::new(13, 0).fork(i)),
                    &grid(),
                )
                .unwrap()
            })
            .collect();
        let k = env.curve("K").unwrap();
        for i in 0..k.u.len() {
            assert_eq!(k.lower[i], sims[0].k.values[i].min(sims[1].k.values[i]));
            assert_eq!(k.upper[i], sims[0].k.values[i].max(sims[1].k.values[i]));
        }
        assert!(envelope_test(&p, 1, &grid(), &RngState::new(13, 0)).is_err());
        for c in &env.curves {
            assert!(c.lower.iter().zip(&c.upper).all(|(l, u)| !(l > u)));
        }
    }
}
