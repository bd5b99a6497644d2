//! Exponential-family models: `log f(y | θ) = ⟨t(y), η(θ)⟩`.
//!
//! Point-process models (Strauss, Candy, area-interaction) are parameterized
//! directly in natural coordinates, so `η(θ) = θ`. The Gaussian model keeps
//! the (mean, variance) coordinates and maps them to `(θ1/θ2, -1/(2θ2))`.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{area_statistic, candy_counts, pair_count};
use crate::param::ParameterVector;
use crate::space::{PointPattern, Window};

/// Fixed geometry of the Candy segment process.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCandy")]
pub struct CandyParams {
    /// Segment length `l`.
    pub length: f64,
    /// Connection range `r_c`.
    pub connect_range: f64,
    /// Connection curvature `τ_c`.
    pub connect_curvature: f64,
    /// Rejection range `r_r`.
    pub reject_range: f64,
    /// Rejection curvature `τ_r`.
    pub reject_curvature: f64,
}

#[derive(Deserialize)]
struct RawCandy {
    length: f64,
    connect_range: f64,
    connect_curvature: f64,
    reject_range: Option<f64>,
    reject_curvature: f64,
}

impl TryFrom<RawCandy> for CandyParams {
    type Error = Error;

    fn try_from(raw: RawCandy) -> Result<Self> {
        let p = CandyParams {
            length: raw.length,
            connect_range: raw.connect_range,
            connect_curvature: raw.connect_curvature,
            reject_range: raw.reject_range.unwrap_or(raw.length),
            reject_curvature: raw.reject_curvature,
        };
        p.validate()?;
        Ok(p)
    }
}

impl CandyParams {
    /// Rejection range defaults to one segment length.
    pub fn new(length: f64, connect_range: f64, connect_curvature: f64, reject_curvature: f64) -> Self {
        CandyParams { length, connect_range, connect_curvature, reject_range: length, reject_curvature }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in
            [("length", self.length), ("connect_range", self.connect_range), ("reject_range", self.reject_range)]
        {
            if !(v > 0.0 && v.is_finite()) {
                return invalid(format!("candy {name} must be positive, got {v}"));
            }
        }
        for (name, v) in [("connect_curvature", self.connect_curvature), ("reject_curvature", self.reject_curvature)] {
            if !(v > 0.0 && v < FRAC_PI_2) {
                return invalid(format!("candy {name} must lie in (0, pi/2), got {v}"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    /// `m` i.i.d. Normal(θ1, θ2) observations.
    Gaussian { m: usize },
    /// Pairwise repulsion with range `r`; θ = (log β, log γ).
    Strauss { r: f64, window: Window },
    /// Connected segment process; θ = (θ_d, θ_s, θ_f, θ_r).
    Candy {
        #[serde(flatten)]
        params: CandyParams,
        window: Window,
    },
    /// Union-of-disks interaction with radius `r`; θ = (log β, log γ).
    /// `resolution` is the quadrature cell size used for the area.
    AreaInteraction { r: f64, resolution: f64, window: Window },
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::Gaussian { m } => {
                if *m == 0 {
                    return invalid("gaussian sample size m must be at least 1");
                }
            }
            ModelSpec::Strauss { r, .. } => {
                if !(*r > 0.0 && r.is_finite()) {
                    return invalid(format!("strauss range must be positive, got {r}"));
                }
            }
            ModelSpec::Candy { params, .. } => params.validate()?,
            ModelSpec::AreaInteraction { r, resolution, .. } => {
                crate::geometry::union::check_union_args(*r, *resolution)?;
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Gaussian { .. } => "gaussian",
            ModelSpec::Strauss { .. } => "strauss",
            ModelSpec::Candy { .. } => "candy",
            ModelSpec::AreaInteraction { .. } => "area-interaction",
        }
    }

    pub fn param_dim(&self) -> usize {
        self.param_names().len()
    }

    pub fn stat_dim(&self) -> usize {
        self.stat_names().len()
    }

    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            ModelSpec::Gaussian { .. } => &["theta1", "theta2"],
            ModelSpec::Strauss { .. } | ModelSpec::AreaInteraction { .. } => &["log_beta", "log_gamma"],
            ModelSpec::Candy { .. } => &["theta_d", "theta_s", "theta_f", "theta_r"],
        }
    }

    pub fn stat_names(&self) -> &'static [&'static str] {
        match self {
            ModelSpec::Gaussian { .. } => &["sum", "sum_sq"],
            ModelSpec::Strauss { .. } => &["n", "s_r"],
            ModelSpec::Candy { .. } => &["n_d", "n_s", "n_f", "n_r"],
            ModelSpec::AreaInteraction { .. } => &["n", "a_r"],
        }
    }

    pub fn window(&self) -> Option<&Window> {
        match self {
            ModelSpec::Gaussian { .. } => None,
            ModelSpec::Strauss { window, .. }
            | ModelSpec::Candy { window, .. }
            | ModelSpec::AreaInteraction { window, .. } => Some(window),
        }
    }

    pub fn is_point_process(&self) -> bool {
        !matches!(self, ModelSpec::Gaussian { .. })
    }

    /// Interaction range used to size local moves in the point-process sampler.
    pub fn interaction_range(&self) -> Option<f64> {
        match self {
            ModelSpec::Gaussian { .. } => None,
            ModelSpec::Strauss { r, .. } | ModelSpec::AreaInteraction { r, .. } => Some(*r),
            ModelSpec::Candy { params, .. } => Some(params.reject_range),
        }
    }
}

/// Sufficient statistic vector `t(y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SufficientStatistics(Vec<f64>);

impl SufficientStatistics {
    pub fn new(values: Vec<f64>) -> Self {
        SufficientStatistics(values)
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
}

impl From<Vec<f64>> for SufficientStatistics {
    fn from(v: Vec<f64>) -> Self {
        SufficientStatistics(v)
    }
}

/// Data a statistic can be computed from.
#[derive(Clone, Copy, Debug)]
pub enum Observation<'a> {
    Sample(&'a [f64]),
    Pattern(&'a PointPattern),
}

pub fn natural_parameters(model: &ModelSpec, theta: &ParameterVector) -> Result<Vec<f64>> {
    if theta.dim() != model.param_dim() {
        return invalid(format!(
            "{} model expects {} parameters, got {}",
            model.name(),
            model.param_dim(),
            theta.dim()
        ));
    }
    if !theta.is_finite() {
        return Err(Error::Domain(format!("non-finite parameter {:?}", theta.values())));
    }
    match model {
        ModelSpec::Gaussian { .. } => {
            let (mean, var) = (theta[0], theta[1]);
            if var <= 0.0 {
                return Err(Error::Domain(format!("gaussian variance must be positive, got {var}")));
            }
            Ok(vec![mean / var, -0.5 / var])
        }
        ModelSpec::Strauss { .. } => {
            if theta[1] > 0.0 {
                return Err(Error::Domain(format!("strauss log gamma must be <= 0, got {}", theta[1])));
            }
            Ok(theta.values().to_vec())
        }
        ModelSpec::Candy { .. } | ModelSpec::AreaInteraction { .. } => Ok(theta.values().to_vec()),
    }
}

pub fn sufficient_statistics(model: &ModelSpec, data: Observation<'_>) -> Result<SufficientStatistics> {
    match (model, data) {
        (ModelSpec::Gaussian { .. }, Observation::Sample(xs)) => Ok(gaussian_statistics(xs)),
        (ModelSpec::Gaussian { .. }, Observation::Pattern(_)) => {
            invalid("gaussian model needs a real-valued sample, not a point pattern")
        }
        (_, Observation::Sample(_)) => invalid(format!("{} model needs a point pattern", model.name())),
        (ModelSpec::Strauss { r, .. }, Observation::Pattern(p)) => {
            Ok(SufficientStatistics(vec![p.len() as f64, pair_count(p, *r) as f64]))
        }
        (ModelSpec::Candy { params, .. }, Observation::Pattern(p)) => {
            Ok(SufficientStatistics(candy_counts(p, params)?.as_vec()))
        }
        (ModelSpec::AreaInteraction { r, resolution, window }, Observation::Pattern(p)) => {
            let a = area_statistic(p, *r, window, *resolution)?;
            Ok(SufficientStatistics(vec![p.len() as f64, a]))
        }
    }
}

pub(crate) fn gaussian_statistics(xs: &[f64]) -> SufficientStatistics {
    let (s1, s2) = xs.iter().fold((0.0, 0.0), |(a, b), x| (a + x, b + x * x));
    SufficientStatistics(vec![s1, s2])
}

/// Checks that observed statistics are attainable under the model.
pub fn validate_statistics(model: &ModelSpec, t: &SufficientStatistics) -> Result<()> {
    if t.len() != model.stat_dim() {
        return invalid(format!("{} model has {} statistics, got {}", model.name(), model.stat_dim(), t.len()));
    }
    if t.values().iter().any(|v| !v.is_finite()) {
        return invalid("statistics must be finite");
    }
    let v = t.values();
    match model {
        ModelSpec::Gaussian { m } => {
            let bound = v[0] * v[0] / *m as f64;
            if v[1] < bound * (1.0 - 1e-12) {
                return invalid(format!("impossible gaussian statistics: sum of squares {} < sum^2/m = {bound}", v[1]));
            }
        }
        ModelSpec::Strauss { .. } => {
            if v[0] < 0.0 || v[1] < 0.0 || v[1] > v[0] * (v[0] - 1.0).max(0.0) / 2.0 {
                return invalid(format!("impossible strauss statistics (n, s_r) = ({}, {})", v[0], v[1]));
            }
        }
        ModelSpec::Candy { .. } => {
            if v.iter().any(|x| *x < 0.0) {
                return invalid("candy counts must be non-negative");
            }
        }
        ModelSpec::AreaInteraction { r, window, .. } => {
            let cap = window.volume() / (PI * r * r);
            if v[0] < 0.0 || v[1] > 0.0 || -v[1] > cap * (1.0 + 1e-9) {
                return invalid(format!("impossible area-interaction statistics (n, a_r) = ({}, {})", v[0], v[1]));
            }
        }
    }
    Ok(())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `⟨t, η(θ)⟩`; no normalizing constant.
pub fn log_unnormalized_density(model: &ModelSpec, t: &SufficientStatistics, theta: &ParameterVector) -> Result<f64> {
    let eta = natural_parameters(model, theta)?;
    if eta.len() != t.len() {
        return invalid(format!("statistic length {} does not match model ({})", t.len(), eta.len()));
    }
    Ok(dot(t.values(), &eta))
}

/// `log c(θ) = (m/2) log(2π θ2) + m θ1² / (2 θ2)` for `m` Gaussian observations.
pub fn gaussian_log_partition(theta: &ParameterVector, m: usize) -> Result<f64> {
    let (mean, var) = (theta[0], theta[1]);
    if !(var > 0.0) {
        return Err(Error::Domain(format!("gaussian variance must be positive, got {var}")));
    }
    let m = m as f64;
    Ok(0.5 * m * (2.0 * PI * var).ln() + m * mean * mean / (2.0 * var))
}

/// `m` i.i.d. Normal(θ1, θ2) draws.
pub fn sample_gaussian_exact<R: Rng + ?Sized>(theta: &ParameterVector, m: usize, rng: &mut R) -> Result<Vec<f64>> {
    if theta.dim() != 2 {
        return invalid(format!("gaussian parameter has dimension 2, got {}", theta.dim()));
    }
    if !(theta[1] > 0.0) {
        return Err(Error::Domain(format!("gaussian variance must be positive, got {}", theta[1])));
    }
    let normal = Normal::new(theta[0], theta[1].sqrt()).map_err(|e| Error::Domain(e.to_string()))?;
    Ok((0..m).map(|_| normal.sample(rng)).collect())
}

/// Statistics of `m` exact draws, without materializing the sample.
pub(crate) fn gaussian_draw_statistics<R: Rng + ?Sized>(
    theta: &ParameterVector,
    m: usize,
    rng: &mut R,
) -> Result<SufficientStatistics> {
    if !(theta[1] > 0.0) {
        return Err(Error::Domain(format!("gaussian variance must be positive, got {}", theta[1])));
    }
    let normal = Normal::new(theta[0], theta[1].sqrt()).map_err(|e| Error::Domain(e.to_string()))?;
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..m {
        let x: f64 = normal.sample(rng);
        s1 += x;
        s2 += x * x;
    }
    Ok(SufficientStatistics(vec![s1, s2]))
}
