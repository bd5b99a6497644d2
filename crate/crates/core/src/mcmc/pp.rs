//! Metropolis–Hastings birth/death/move dynamics for Gibbs point processes.
//!
//! The chain targets `f(x | θ) = exp⟨t(x), θ⟩` with respect to the unit-rate
//! Poisson process on the location space, marks uniform on `[0, π)` with
//! probability one. Statistics are updated incrementally: each proposal only
//! touches the neighbourhood of the point being added or removed.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::grid::GridIndex;
use crate::geometry::segment::{candy_reach, connection, rejects, Segment};
use crate::geometry::union::CoverageGrid;
use crate::models::{natural_parameters, CandyParams, ModelSpec, SufficientStatistics};
use crate::param::ParameterVector;
use crate::rng::RngState;
use crate::space::{dist2, wrap_angle, MarkedPoint, PointPattern, Window};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PpSamplerConfig {
    pub p_birth: f64,
    pub p_death: f64,
    /// Local move of one point; any remaining probability is a null step.
    pub p_move: f64,
    /// Steps per call (one birth, death or move proposal each).
    pub sweeps: usize,
    /// Share of Candy births placed at an existing free endpoint.
    pub attach_fraction: f64,
    /// A chain started from the empty pattern runs `burn_factor * sweeps` steps first.
    pub burn_factor: usize,
}

impl Default for PpSamplerConfig {
    fn default() -> Self {
        PpSamplerConfig { p_birth: 0.4, p_death: 0.4, p_move: 0.2, sweeps: 100, attach_fraction: 0.0, burn_factor: 10 }
    }
}

impl PpSamplerConfig {
    pub fn with_sweeps(sweeps: usize) -> Self {
        PpSamplerConfig { sweeps, ..Default::default() }
    }

    /// Defaults for Candy: connected births help the chain build networks.
    pub fn candy(sweeps: usize) -> Self {
        PpSamplerConfig { sweeps, attach_fraction: 0.5, ..Default::default() }
    }

    pub fn burn_in_steps(&self) -> usize {
        self.burn_factor.max(1) * self.sweeps
    }

    pub fn validate(&self) -> Result<()> {
        let ps = [self.p_birth, self.p_death, self.p_move];
        if ps.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return invalid(format!("proposal probabilities must be non-negative, got {ps:?}"));
        }
        if self.p_birth <= 0.0 || self.p_death <= 0.0 {
            return invalid("birth and death probabilities must both be positive");
        }
        if ps.iter().sum::<f64>() > 1.0 + 1e-12 {
            return invalid(format!("proposal probabilities sum above one: {ps:?}"));
        }
        if !(0.0..=1.0).contains(&self.attach_fraction) || (self.attach_fraction == 1.0) {
            return invalid(format!("attach_fraction must lie in [0, 1), got {}", self.attach_fraction));
        }
        Ok(())
    }
}

/// Where points live and how they are drawn.
pub trait LocationSpace: Clone + Send + Sync {
    /// Total reference mass (area for a window, site count for a lattice).
    fn volume(&self) -> f64;
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 2];
    /// Symmetric local perturbation; `None` when the proposal leaves the space.
    fn perturb<R: Rng + ?Sized>(&self, loc: [f64; 2], radius: f64, rng: &mut R) -> Option<[f64; 2]>;
    fn bounds(&self) -> &Window;
    fn is_continuous(&self) -> bool {
        true
    }
}

impl LocationSpace for Window {
    fn volume(&self) -> f64 {
        Window::volume(self)
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 2] {
        self.sample_uniform(rng)
    }

    fn perturb<R: Rng + ?Sized>(&self, loc: [f64; 2], radius: f64, rng: &mut R) -> Option<[f64; 2]> {
        let (rho, phi) = (radius * rng.random::<f64>().sqrt(), 2.0 * PI * rng.random::<f64>());
        let p = [loc[0] + rho * phi.cos(), loc[1] + rho * phi.sin()];
        self.contains(p).then_some(p)
    }

    fn bounds(&self) -> &Window {
        self
    }
}

/// Finite set of sites with counting reference measure. Used to check the
/// sampler against exactly enumerable Gibbs distributions.
#[derive(Clone, Debug)]
pub struct Lattice {
    sites: Vec<[f64; 2]>,
    window: Window,
}

impl Lattice {
    pub fn new(sites: Vec<[f64; 2]>, window: Window) -> Result<Self> {
        if sites.is_empty() || sites.iter().any(|s| !window.contains(*s)) {
            return invalid("lattice needs at least one site, all inside the window");
        }
        Ok(Lattice { sites, window })
    }

    /// Centres of an `k × k` grid of cells over `window`.
    pub fn cell_centres(window: Window, k: usize) -> Self {
        let mut sites = Vec::with_capacity(k * k);
        for j in 0..k {
            for i in 0..k {
                sites.push([
                    window.lower()[0] + (i as f64 + 0.5) * window.width() / k as f64,
                    window.lower()[1] + (j as f64 + 0.5) * window.height() / k as f64,
                ]);
            }
        }
        Lattice { sites, window }
    }

    pub fn sites(&self) -> &[[f64; 2]] {
        &self.sites
    }

    pub fn site_of(&self, p: [f64; 2]) -> Option<usize> {
        self.sites.iter().position(|s| dist2(*s, p) < 1e-18)
    }
}

impl LocationSpace for Lattice {
    fn volume(&self) -> f64 {
        self.sites.len() as f64
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 2] {
        self.sites[rng.random_range(0..self.sites.len())]
    }

    fn perturb<R: Rng + ?Sized>(&self, _loc: [f64; 2], _radius: f64, rng: &mut R) -> Option<[f64; 2]> {
        Some(self.sample(rng))
    }

    fn bounds(&self) -> &Window {
        &self.window
    }

    fn is_continuous(&self) -> bool {
        false
    }
}

#[derive(Clone, Debug)]
enum Interaction {
    Strauss { r: f64, grid: GridIndex },
    Candy { p: CandyParams, grid: GridIndex, links: Vec<[u32; 2]> },
    Area { r: f64, cov: CoverageGrid },
}

type Delta = [f64; 4];

/// Persistent sampler state: pattern, spatial index and running statistics.
#[derive(Clone, Debug)]
pub struct PpChain<S: LocationSpace = Window> {
    model: ModelSpec,
    space: S,
    points: Vec<MarkedPoint>,
    /// Integer statistics: Strauss `[n, s_r]`, Candy `[n_d, n_s, n_f, n_r]`,
    /// area-interaction `[n, covered cells]`.
    counts: [i64; 4],
    inter: Interaction,
    proposed: u64,
    accepted: u64,
    max_points: Option<usize>,
}

impl PpChain<Window> {
    pub fn new(model: &ModelSpec, init: &PointPattern) -> Result<Self> {
        let window = *model
            .window()
            .ok_or_else(|| crate::Error::Unsupported(format!("{} is not a point-process model", model.name())))?;
        PpChain::on_space(model, window, init.points())
    }

    pub fn empty(model: &ModelSpec) -> Result<Self> {
        let window = *model
            .window()
            .ok_or_else(|| crate::Error::Unsupported(format!("{} is not a point-process model", model.name())))?;
        PpChain::on_space(model, window, &[])
    }
}

impl<S: LocationSpace> PpChain<S> {
    pub fn on_space(model: &ModelSpec, space: S, init: &[MarkedPoint]) -> Result<Self> {
        model.validate()?;
        let window = *space.bounds();
        let inter = match model {
            ModelSpec::Gaussian { .. } => {
                return Err(crate::Error::Unsupported("gaussian model has no point-process sampler".into()))
            }
            ModelSpec::Strauss { r, .. } => Interaction::Strauss { r: *r, grid: GridIndex::new(&window, *r) },
            ModelSpec::Candy { params, .. } => {
                Interaction::Candy { p: *params, grid: GridIndex::new(&window, candy_reach(params)), links: Vec::new() }
            }
            ModelSpec::AreaInteraction { r, resolution, .. } => {
                Interaction::Area { r: *r, cov: CoverageGrid::new(&window, *resolution)? }
            }
        };
        let mut chain = PpChain {
            model: model.clone(),
            space,
            points: Vec::new(),
            counts: [0; 4],
            inter,
            proposed: 0,
            accepted: 0,
            max_points: None,
        };
        let candy = matches!(model, ModelSpec::Candy { .. });
        for (i, q) in init.iter().enumerate() {
            if !window.contains(q.loc) {
                return invalid(format!("initial point {i} lies outside the window"));
            }
            if candy && q.angle.is_none() {
                return invalid(format!("candy model needs an orientation on initial point {i}"));
            }
            let q = if candy { *q } else { MarkedPoint { loc: q.loc, angle: None } };
            let d = chain.delta_add(&q);
            chain.apply_add(q, &d);
        }
        Ok(chain)
    }

    /// Caps the number of points; births beyond the cap are rejected.
    pub fn with_max_points(mut self, cap: usize) -> Self {
        self.max_points = Some(cap);
        self
    }

    pub fn points(&self) -> &[MarkedPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn pattern(&self) -> PointPattern {
        PointPattern::from_trusted(self.points.clone(), *self.space.bounds())
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    pub fn statistics(&self) -> SufficientStatistics {
        let c = self.counts;
        SufficientStatistics::new(match &self.inter {
            Interaction::Strauss { .. } => vec![c[0] as f64, c[1] as f64],
            Interaction::Candy { .. } => c.iter().map(|v| *v as f64).collect(),
            Interaction::Area { r, cov } => vec![c[0] as f64, -(c[1] as f64) * cov.cell_area() / (PI * r * r)],
        })
    }

    fn segment(&self, q: &MarkedPoint) -> Segment {
        let len = match &self.inter {
            Interaction::Candy { p, .. } => p.length,
            _ => 0.0,
        };
        Segment { center: q.loc, angle: q.angle.unwrap_or(0.0), length: len }
    }

    /// Statistic change from adding `q`.
    fn delta_add(&self, q: &MarkedPoint) -> Delta {
        match &self.inter {
            Interaction::Strauss { r, grid } => {
                let r2 = r * r;
                let mut close = 0;
                grid.for_each_near(q.loc, |j| close += (dist2(q.loc, self.points[j].loc) < r2) as i32);
                [1.0, close as f64, 0.0, 0.0]
            }
            Interaction::Candy { p, grid, links } => {
                let s = self.segment(q);
                let mut d = [0.0; 4];
                let mut own = [0u32; 2];
                grid.for_each_near(q.loc, |j| {
                    let t = self.segment(&self.points[j]);
                    if let Some((eq, ej)) = connection(&s, &t, p.connect_range, p.connect_curvature) {
                        own[eq] += 1;
                        if links[j][ej] == 0 {
                            let mut after = links[j];
                            after[ej] += 1;
                            d[status(links[j])] -= 1.0;
                            d[status(after)] += 1.0;
                        }
                    }
                    if rejects(&s, &t, p.reject_range, p.reject_curvature) {
                        d[3] += 1.0;
                    }
                });
                d[status(own)] += 1.0;
                d
            }
            Interaction::Area { r, cov } => [1.0, cov.gain_if_added(q.loc, *r) as f64, 0.0, 0.0],
        }
    }

    /// Statistic change from removing point `i`.
    fn delta_remove(&self, i: usize) -> Delta {
        let q = self.points[i];
        match &self.inter {
            Interaction::Strauss { r, grid } => {
                let r2 = r * r;
                let mut close = 0;
                grid.for_each_near(q.loc, |j| close += (j != i && dist2(q.loc, self.points[j].loc) < r2) as i32);
                [-1.0, -(close as f64), 0.0, 0.0]
            }
            Interaction::Candy { p, grid, links } => {
                let s = self.segment(&q);
                let mut d = [0.0; 4];
                grid.for_each_near(q.loc, |j| {
                    if j == i {
                        return;
                    }
                    let t = self.segment(&self.points[j]);
                    if let Some((_, ej)) = connection(&s, &t, p.connect_range, p.connect_curvature) {
                        if links[j][ej] == 1 {
                            let mut after = links[j];
                            after[ej] -= 1;
                            d[status(links[j])] -= 1.0;
                            d[status(after)] += 1.0;
                        }
                    }
                    if rejects(&s, &t, p.reject_range, p.reject_curvature) {
                        d[3] -= 1.0;
                    }
                });
                d[status(links[i])] -= 1.0;
                d
            }
            Interaction::Area { r, cov } => [-1.0, -(cov.loss_if_removed(q.loc, *r) as f64), 0.0, 0.0],
        }
    }

    fn apply_add(&mut self, q: MarkedPoint, d: &Delta) {
        let idx = self.points.len();
        match &mut self.inter {
            Interaction::Strauss { grid, .. } => grid.insert(idx, q.loc),
            Interaction::Candy { p, grid, links } => {
                let len = p.length;
                let s = Segment { center: q.loc, angle: q.angle.unwrap_or(0.0), length: len };
                let mut own = [0u32; 2];
                let points = &self.points;
                grid.for_each_near(q.loc, |j| {
                    let t = Segment { center: points[j].loc, angle: points[j].angle.unwrap_or(0.0), length: len };
                    if let Some((eq, ej)) = connection(&s, &t, p.connect_range, p.connect_curvature) {
                        own[eq] += 1;
                        links[j][ej] += 1;
                    }
                });
                links.push(own);
                grid.insert(idx, q.loc);
            }
            Interaction::Area { r, cov } => {
                cov.add_disk(q.loc, *r);
            }
        }
        self.points.push(q);
        for k in 0..4 {
            self.counts[k] += d[k] as i64;
        }
    }

    fn apply_remove(&mut self, i: usize, d: &Delta) {
        let q = self.points[i];
        let last = self.points.len() - 1;
        match &mut self.inter {
            Interaction::Strauss { grid, .. } => {
                grid.remove(i, q.loc);
                if i != last {
                    grid.relabel(last, i, self.points[last].loc);
                }
            }
            Interaction::Candy { p, grid, links } => {
                let len = p.length;
                let s = Segment { center: q.loc, angle: q.angle.unwrap_or(0.0), length: len };
                let points = &self.points;
                grid.for_each_near(q.loc, |j| {
                    if j == i {
                        return;
                    }
                    let t = Segment { center: points[j].loc, angle: points[j].angle.unwrap_or(0.0), length: len };
                    if let Some((_, ej)) = connection(&s, &t, p.connect_range, p.connect_curvature) {
                        links[j][ej] -= 1;
                    }
                });
                grid.remove(i, q.loc);
                if i != last {
                    grid.relabel(last, i, self.points[last].loc);
                }
                links.swap_remove(i);
            }
            Interaction::Area { r, cov } => {
                cov.remove_disk(q.loc, *r);
            }
        }
        self.points.swap_remove(i);
        for k in 0..4 {
            self.counts[k] += d[k] as i64;
        }
    }

    /// Log statistic change in `f`, with area cells converted to `a_r` units.
    fn log_ratio(&self, eta: &[f64], d: &Delta) -> f64 {
        match &self.inter {
            Interaction::Area { r, cov } => eta[0] * d[0] - eta[1] * d[1] * cov.cell_area() / (PI * r * r),
            _ => eta.iter().zip(d).map(|(e, v)| e * v).sum(),
        }
    }

    fn draw_mark<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<f64> {
        matches!(self.inter, Interaction::Candy { .. }).then(|| PI * rng.random::<f64>())
    }

    fn attach_enabled(&self, cfg: &PpSamplerConfig) -> bool {
        cfg.attach_fraction > 0.0 && self.space.is_continuous() && matches!(self.inter, Interaction::Candy { .. })
    }

    /// Density of the connected-birth kernel at `q` given the current pattern,
    /// skipping point `skip`, relative to Lebesgue location × uniform mark
    /// probability.
    fn attach_density(&self, q: &MarkedPoint, skip: Option<usize>) -> f64 {
        let Interaction::Candy { p, grid, .. } = &self.inter else {
            return 0.0;
        };
        let n = self.points.len() - skip.is_some() as usize;
        if n == 0 {
            return 0.0;
        }
        let s = self.segment(q);
        let ends = s.endpoints();
        let rc2 = p.connect_range * p.connect_range;
        let mut hits = 0usize;
        grid.for_each_near(q.loc, |j| {
            if Some(j) == skip {
                return;
            }
            let t = self.segment(&self.points[j]);
            if crate::geometry::orientation_distance(s.angle, t.angle) >= p.connect_curvature {
                return;
            }
            for e in t.endpoints() {
                for k in ends {
                    hits += (dist2(e, k) < rc2) as usize;
                }
            }
        });
        let per_hit = 0.5 / (PI * p.connect_range * p.connect_range) * (PI / (2.0 * p.connect_curvature));
        hits as f64 * per_hit / (2 * n) as f64
    }

    fn propose_attached<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<MarkedPoint> {
        let Interaction::Candy { p, .. } = &self.inter else {
            return None;
        };
        let j = rng.random_range(0..self.points.len());
        let base = self.segment(&self.points[j]);
        let anchor = base.endpoints()[rng.random_range(0..2)];
        let (rho, phi) = (p.connect_range * rng.random::<f64>().sqrt(), 2.0 * PI * rng.random::<f64>());
        let tip = [anchor[0] + rho * phi.cos(), anchor[1] + rho * phi.sin()];
        let angle = wrap_angle(base.angle + p.connect_curvature * (2.0 * rng.random::<f64>() - 1.0));
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let h = 0.5 * p.length * sign;
        let center = [tip[0] - h * angle.cos(), tip[1] - h * angle.sin()];
        self.space.bounds().contains(center).then_some(MarkedPoint { loc: center, angle: Some(angle) })
    }

    fn birth_density(&self, q: &MarkedPoint, skip: Option<usize>, cfg: &PpSamplerConfig) -> f64 {
        let uniform = 1.0 / self.space.volume();
        let n_rest = self.points.len() - skip.is_some() as usize;
        if self.attach_enabled(cfg) && n_rest > 0 {
            (1.0 - cfg.attach_fraction) * uniform + cfg.attach_fraction * self.attach_density(q, skip)
        } else {
            uniform
        }
    }

    fn birth<R: Rng + ?Sized>(&mut self, eta: &[f64], cfg: &PpSamplerConfig, rng: &mut R) -> bool {
        let n = self.points.len();
        if self.max_points.is_some_and(|cap| n >= cap) {
            return false;
        }
        let attach = self.attach_enabled(cfg) && n > 0 && rng.random::<f64>() < cfg.attach_fraction;
        let q = if attach {
            match self.propose_attached(rng) {
                Some(q) => q,
                None => return false,
            }
        } else {
            MarkedPoint { loc: self.space.sample(rng), angle: self.draw_mark(rng) }
        };
        let d = self.delta_add(&q);
        let log_a = self.log_ratio(eta, &d) + cfg.p_death.ln()
            - ((n + 1) as f64).ln()
            - cfg.p_birth.ln()
            - self.birth_density(&q, None, cfg).ln();
        if accept(log_a, rng) {
            self.apply_add(q, &d);
            true
        } else {
            false
        }
    }

    fn death<R: Rng + ?Sized>(&mut self, eta: &[f64], cfg: &PpSamplerConfig, rng: &mut R) -> bool {
        let n = self.points.len();
        if n == 0 {
            return false;
        }
        let i = rng.random_range(0..n);
        let d = self.delta_remove(i);
        let q = self.points[i];
        let log_a = self.log_ratio(eta, &d) + cfg.p_birth.ln() + self.birth_density(&q, Some(i), cfg).ln()
            - cfg.p_death.ln()
            + (n as f64).ln();
        if accept(log_a, rng) {
            self.apply_remove(i, &d);
            true
        } else {
            false
        }
    }

    fn shift<R: Rng + ?Sized>(&mut self, eta: &[f64], rng: &mut R) -> bool {
        let n = self.points.len();
        if n == 0 {
            return false;
        }
        let i = rng.random_range(0..n);
        let old = self.points[i];
        let radius = 0.5 * self.model.interaction_range().unwrap_or(0.0);
        let Some(loc) = self.space.perturb(old.loc, radius, rng) else {
            return false;
        };
        let angle = match (&self.inter, old.angle) {
            (Interaction::Candy { p, .. }, Some(a)) => {
                Some(wrap_angle(a + 0.5 * p.connect_curvature * (2.0 * rng.random::<f64>() - 1.0)))
            }
            _ => old.angle,
        };
        let q = MarkedPoint { loc, angle };
        let d_out = self.delta_remove(i);
        self.apply_remove(i, &d_out);
        let d_in = self.delta_add(&q);
        let log_a = self.log_ratio(eta, &d_out) + self.log_ratio(eta, &d_in);
        if accept(log_a, rng) {
            self.apply_add(q, &d_in);
            true
        } else {
            // Restore: `old` is re-appended, so point order may change.
            let back = self.delta_add(&old);
            self.apply_add(old, &back);
            false
        }
    }

    /// Runs `steps` proposals at parameter `theta`.
    pub fn run(
        &mut self,
        theta: &ParameterVector,
        steps: usize,
        cfg: &PpSamplerConfig,
        rng: &mut RngState,
    ) -> Result<()> {
        cfg.validate()?;
        let eta = natural_parameters(&self.model, theta)?;
        for _ in 0..steps {
            let u: f64 = rng.random();
            let moved = if u < cfg.p_birth {
                self.birth(&eta, cfg, rng)
            } else if u < cfg.p_birth + cfg.p_death {
                self.death(&eta, cfg, rng)
            } else if u < cfg.p_birth + cfg.p_death + cfg.p_move {
                self.shift(&eta, rng)
            } else {
                continue;
            };
            self.proposed += 1;
            self.accepted += moved as u64;
        }
        Ok(())
    }
}

fn status(l: [u32; 2]) -> usize {
    match (l[0] > 0, l[1] > 0) {
        (true, true) => 0,
        (false, false) => 2,
        _ => 1,
    }
}

#[inline]
fn accept<R: Rng + ?Sized>(log_a: f64, rng: &mut R) -> bool {
    if log_a >= 0.0 {
        return true;
    }
    if log_a.is_nan() {
        return false;
    }
    rng.random::<f64>() < log_a.exp()
}

/// Runs `config.sweeps` steps from `init` at `theta` and returns the final pattern.
pub fn pp_mh_simulate(
    model: &ModelSpec,
    theta: &ParameterVector,
    config: &PpSamplerConfig,
    init: &PointPattern,
    rng: &mut RngState,
) -> Result<PointPattern> {
    let mut chain = PpChain::new(model, init)?;
    chain.run(theta, config.sweeps, config, rng)?;
    Ok(chain.pattern())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{sufficient_statistics, Observation};

    fn pv(v: &[f64]) -> ParameterVector {
        ParameterVector::new(v.to_vec())
    }

    fn recomputed(model: &ModelSpec, chain: &PpChain) -> Vec<f64> {
        sufficient_statistics(model, Observation::Pattern(&chain.pattern())).unwrap().values().to_vec()
    }

    #[test]
    fn config_validation() {
        assert!(PpSamplerConfig::default().validate().is_ok());
        let bad = PpSamplerConfig { p_death: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = PpSamplerConfig { p_birth: 0.6, p_death: 0.6, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = PpSamplerConfig { p_move: -0.1, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn death_on_empty_pattern_is_rejected() {
        let model = ModelSpec::Strauss { r: 0.1, window: Window::unit_square() };
        let mut chain = PpChain::empty(&model).unwrap();
        let cfg = PpSamplerConfig { p_birth: 1e-9, p_death: 1.0 - 1e-9, p_move: 0.0, ..Default::default() };
        let mut rng = RngState::new(1, 0);
        chain.run(&pv(&[4.6, -1.6]), 50, &cfg, &mut rng).unwrap();
        assert!(chain.is_empty());
        assert_eq!(chain.acceptance_rate(), 0.0);
    }

    #[test]
    fn incremental_statistics_match_recomputation() {
        let w = Window::rect(3.0, 1.0).unwrap();
        let cases = [
            (
                ModelSpec::Strauss { r: 0.1, window: Window::unit_square() },
                pv(&[4.6, -1.6]),
                PpSamplerConfig::with_sweeps(1),
            ),
            (
                ModelSpec::Candy { params: CandyParams::new(0.12, 0.01, 0.5, 0.5), window: w },
                pv(&[10.0, 7.0, 3.0, -1.0]),
                PpSamplerConfig::candy(1),
            ),
            (
                ModelSpec::AreaInteraction { r: 0.05, resolution: 0.005, window: Window::unit_square() },
                pv(&[5.0, 0.5]),
                PpSamplerConfig::with_sweeps(1),
            ),
        ];
        for (model, theta, cfg) in cases {
            let mut chain = PpChain::empty(&model).unwrap();
            let mut rng = RngState::new(5, 0);
            for _ in 0..40 {
                chain.run(&theta, 250, &cfg, &mut rng).unwrap();
                let fresh = recomputed(&model, &chain);
                let incr = chain.statistics();
                for (a, b) in fresh.iter().zip(incr.values()) {
                    assert!((a - b).abs() < 1e-9, "{}: {fresh:?} vs {:?}", model.name(), incr.values());
                }
            }
            assert!(chain.len() > 5, "{} chain stayed small", model.name());
        }
    }

    #[test]
    fn same_seed_same_pattern() {
        let model = ModelSpec::Strauss { r: 0.1, window: Window::unit_square() };
        let run = || {
            let mut rng = RngState::new(77, 2);
            pp_mh_simulate(
                &model,
                &pv(&[4.6, -1.6]),
                &PpSamplerConfig::with_sweeps(2000),
                &PointPattern::empty(Window::unit_square()),
                &mut rng,
            )
            .unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn poisson_degenerate_strauss_mean_count() {
        // log gamma = 0: Poisson(100) point count.
        let model = ModelSpec::Strauss { r: 0.1, window: Window::unit_square() };
        let cfg = PpSamplerConfig::with_sweeps(1);
        let theta = pv(&[100f64.ln(), 0.0]);
        let mut chain = PpChain::empty(&model).unwrap();
        let mut rng = RngState::new(8, 0);
        chain.run(&theta, 20_000, &cfg, &mut rng).unwrap();
        let batches = 200;
        let mut total = 0.0;
        for _ in 0..batches {
            chain.run(&theta, 2_000, &cfg, &mut rng).unwrap();
            total += chain.len() as f64;
        }
        let mean = total / batches as f64;
        assert!((mean - 100.0).abs() < 3.0 * (100.0 / batches as f64).sqrt() * 1.5, "{mean}");
    }

    #[test]
    fn lattice_sampler_respects_cap() {
        let model = ModelSpec::Strauss { r: 0.4, window: Window::unit_square() };
        let lattice = Lattice::cell_centres(Window::unit_square(), 3);
        let mut chain = PpChain::on_space(&model, lattice, &[]).unwrap().with_max_points(3);
        let mut rng = RngState::new(3, 0);
        for _ in 0..1000 {
            chain.run(&pv(&[2.0, -0.5]), 10, &PpSamplerConfig::default(), &mut rng).unwrap();
            assert!(chain.len() <= 3);
        }
    }
}
