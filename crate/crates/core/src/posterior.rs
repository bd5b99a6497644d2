//! Posterior post-processing: quantiles, kernel-density MAP and estimation errors.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::mcmc::pp::{PpChain, PpSamplerConfig};
use crate::mcmc::trace::ChainTrace;
use crate::models::{gaussian_draw_statistics, natural_parameters, ModelSpec};
use crate::param::ParameterVector;
use crate::rng::RngState;

/// Quantile levels of the summary tables.
pub const TABLE_QUANTILES: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

/// Grid points for each marginal density estimate.
pub const KDE_GRID: usize = 512;

/// Type-7 quantile: linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Silverman's rule `1.06 σ̂ n^(−1/5)`.
pub fn silverman_bandwidth(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    1.06 * var.sqrt() * n.powf(-0.2)
}

/// Mode of a Gaussian-kernel density on `grid` points spanning the sample
/// range, with the bandwidth used. A constant sample returns its value.
pub fn marginal_mode(values: &[f64], grid: usize) -> (f64, f64) {
    marginal_mode_with(values, grid, silverman_bandwidth(values))
}

/// As [`marginal_mode`] with a given bandwidth `h`.
pub fn marginal_mode_with(values: &[f64], grid: usize, h: f64) -> (f64, f64) {
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    if !(hi > lo) || !(h > 0.0) {
        return (values[0], 0.0);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut best = (lo, f64::NEG_INFINITY);
    for g in 0..grid {
        let x = lo + (hi - lo) * g as f64 / (grid - 1).max(1) as f64;
        // Kernel mass beyond 8h is negligible.
        let a = sorted.partition_point(|v| *v < x - 8.0 * h);
        let b = sorted.partition_point(|v| *v <= x + 8.0 * h);
        let dens: f64 = sorted[a..b].iter().map(|v| (-0.5 * ((x - v) / h).powi(2)).exp()).sum();
        if dens > best.1 {
            best = (x, dens);
        }
    }
    (best.0, h)
}

/// MAP assembled from the per-marginal kernel-density modes.
pub fn kde_map(samples: &[ParameterVector], grid: usize) -> Result<ParameterVector> {
    if samples.len() < 10 {
        return invalid(format!("kernel density needs at least 10 samples, got {}", samples.len()));
    }
    if grid < 2 {
        return invalid("density grid needs at least 2 points");
    }
    let dim = samples[0].dim();
    Ok(ParameterVector::new(
        (0..dim).map(|i| marginal_mode(&samples.iter().map(|s| s[i]).collect::<Vec<_>>(), grid).0).collect(),
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamSummary {
    pub name: String,
    /// One value per requested level, in the order of `PosteriorSummary::levels`.
    pub quantiles: Vec<f64>,
    pub mean: f64,
    /// `NaN` with fewer than 10 samples.
    pub map: f64,
    pub bandwidth: f64,
    /// Boxplot whiskers: the most extreme samples within 1.5 IQR of the quartiles.
    pub whisker_low: f64,
    pub whisker_high: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub levels: Vec<f64>,
    pub n_samples: usize,
    pub params: Vec<ParamSummary>,
}

impl PosteriorSummary {
    pub fn param(&self, name: &str) -> Option<&ParamSummary> {
        self.params.iter().find(|p| p.name == name)
    }
}

impl ParamSummary {
    /// Quantile at `level` if it was requested.
    pub fn at(&self, levels: &[f64], level: f64) -> Option<f64> {
        levels.iter().position(|l| (l - level).abs() < 1e-12).map(|i| self.quantiles[i])
    }
}

pub fn summarize(trace: &ChainTrace, levels: &[f64]) -> Result<PosteriorSummary> {
    if trace.len() < 2 {
        return invalid(format!("summaries need at least 2 samples, got {}", trace.len()));
    }
    if levels.iter().any(|q| !(0.0..=1.0).contains(q)) {
        return invalid("quantile levels must lie in [0, 1]");
    }
    let params = trace
        .names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let col = trace.column(i);
            let mut sorted = col.clone();
            sorted.sort_by(f64::total_cmp);
            let (q1, q3) = (quantile(&sorted, 0.25), quantile(&sorted, 0.75));
            let iqr = q3 - q1;
            let (map, bandwidth) = if col.len() >= 10 { marginal_mode(&col, KDE_GRID) } else { (f64::NAN, f64::NAN) };
            ParamSummary {
                name: name.clone(),
                quantiles: levels.iter().map(|q| quantile(&sorted, *q)).collect(),
                mean: col.iter().sum::<f64>() / col.len() as f64,
                map,
                bandwidth,
                whisker_low: *sorted.iter().find(|v| **v >= q1 - 1.5 * iqr).unwrap_or(&sorted[0]),
                whisker_high: *sorted.iter().rev().find(|v| **v <= q3 + 1.5 * iqr).unwrap_or(&sorted[sorted.len() - 1]),
            }
        })
        .collect();
    Ok(PosteriorSummary { levels: levels.to_vec(), n_samples: trace.len(), params })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimates {
    pub names: Vec<String>,
    /// `sqrt(diag I⁻¹)` with `I` the Fisher information in the model parameters.
    pub asymptotic_sd: Vec<f64>,
    /// Monte Carlo error of the estimate from batch means.
    pub mc_sd: Vec<f64>,
    pub n_sim: usize,
}

/// `∂η/∂θ`; the identity except for the Gaussian.
fn natural_jacobian(model: &ModelSpec, theta: &ParameterVector) -> DMatrix<f64> {
    match model {
        ModelSpec::Gaussian { .. } => {
            let (a, v) = (theta[0], theta[1]);
            DMatrix::from_row_slice(2, 2, &[1.0 / v, -a / (v * v), 0.0, 1.0 / (2.0 * v * v)])
        }
        _ => DMatrix::identity(model.param_dim(), model.param_dim()),
    }
}

/// Asymptotic and Monte Carlo standard deviations at `theta_hat`.
///
/// Statistics are recorded along one chain at `theta_hat` (i.i.d. draws for
/// the Gaussian), `pp.sweeps` steps apart after the burn-in. The covariance
/// `Ŝ` is the Fisher information in natural coordinates; `V̂` comes from
/// `⌊√n_sim⌋` batch means.
pub fn error_estimates(
    model: &ModelSpec,
    theta_hat: &ParameterVector,
    n_sim: usize,
    pp: &PpSamplerConfig,
    rng: &mut RngState,
) -> Result<ErrorEstimates> {
    model.validate()?;
    natural_parameters(model, theta_hat)?;
    if n_sim < 4 {
        return invalid(format!("error estimates need at least 4 simulations, got {n_sim}"));
    }
    let k = model.stat_dim();
    let mut stats = Vec::with_capacity(n_sim);
    match model {
        ModelSpec::Gaussian { m } => {
            for _ in 0..n_sim {
                stats.push(gaussian_draw_statistics(theta_hat, *m, rng)?.values().to_vec());
            }
        }
        _ => {
            pp.validate()?;
            let mut chain = PpChain::empty(model)?;
            chain.run(theta_hat, pp.burn_in_steps(), pp, rng)?;
            for _ in 0..n_sim {
                chain.run(theta_hat, pp.sweeps, pp, rng)?;
                stats.push(chain.statistics().values().to_vec());
            }
        }
    }

    let n = n_sim as f64;
    let mean = DVector::from_iterator(k, (0..k).map(|i| stats.iter().map(|s| s[i]).sum::<f64>() / n));
    let mut s_hat = DMatrix::zeros(k, k);
    for s in &stats {
        let d = DVector::from_column_slice(s) - &mean;
        s_hat += &d * d.transpose();
    }
    s_hat /= n - 1.0;

    let eig = s_hat.clone().symmetric_eigen();
    let max_ev = eig.eigenvalues.amax();
    let (imin, min_ev) = eig.eigenvalues.argmin();
    if !(min_ev > 1e-12 * max_ev.max(f64::MIN_POSITIVE)) {
        let dir: Vec<String> = eig.eigenvectors.column(imin).iter().map(|v| format!("{v:.4}")).collect();
        return Err(Error::Singular(format!(
            "statistic covariance is singular along ({}) for {:?}",
            dir.join(", "),
            model.stat_names()
        )));
    }
    let s_inv =
        s_hat.clone().try_inverse().ok_or_else(|| Error::Singular("statistic covariance is not invertible".into()))?;

    let b = (n.sqrt().floor() as usize).max(2);
    let len = n_sim / b;
    let mut v_hat = DMatrix::zeros(k, k);
    for j in 0..b {
        let chunk = &stats[j * len..(j + 1) * len];
        let bm = DVector::from_iterator(k, (0..k).map(|i| chunk.iter().map(|s| s[i]).sum::<f64>() / len as f64));
        let d = bm - &mean.clone();
        v_hat += &d * d.transpose();
    }
    v_hat *= len as f64 / (b as f64 - 1.0);

    // Map natural-coordinate covariances back to the model parameters.
    let jac = natural_jacobian(model, theta_hat);
    let j_inv = jac.try_inverse().ok_or_else(|| Error::Singular("natural-parameter map is singular".into()))?;
    let asym = &j_inv * &s_inv * j_inv.transpose();
    let mc = &j_inv * (&s_inv * &v_hat * &s_inv / n) * j_inv.transpose();

    Ok(ErrorEstimates {
        names: model.param_names().iter().map(|s| s.to_string()).collect(),
        asymptotic_sd: (0..k).map(|i| asym[(i, i)].max(0.0).sqrt()).collect(),
        mc_sd: (0..k).map(|i| mc[(i, i)].max(0.0).sqrt()).collect(),
        n_sim,
    })
}
