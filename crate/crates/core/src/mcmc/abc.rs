//! Classical ABC baselines: rejection with a tolerance and k-nearest neighbours.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::models::{validate_statistics, ModelSpec, SufficientStatistics};
use crate::param::{BoxPrior, ParameterVector};
use crate::rng::RngState;

use super::pp::PpSamplerConfig;
use super::simulate_statistics;

/// Metric on statistic space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Distance {
    Euclidean,
    /// Euclidean after dividing each coordinate by its scale.
    Standardized(Vec<f64>),
}

impl Distance {
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Distance::Euclidean => a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt(),
            Distance::Standardized(s) => {
                a.iter().zip(b).zip(s).map(|((x, y), s)| ((x - y) / s).powi(2)).sum::<f64>().sqrt()
            }
        }
    }

    /// Scales from the standard deviations of `n_pilot` prior-predictive draws.
    pub fn from_pilot(
        model: &ModelSpec,
        prior: &BoxPrior,
        n_pilot: usize,
        pp: &PpSamplerConfig,
        rng: &RngState,
    ) -> Result<Self> {
        if n_pilot < 2 {
            return invalid("pilot run needs at least two draws");
        }
        let stats: Vec<Vec<f64>> = prior_predictive(model, prior, n_pilot, pp, rng)?
            .into_iter()
            .filter_map(|(_, t)| t.map(|t| t.values().to_vec()))
            .collect();
        let k = model.stat_dim();
        let n = stats.len() as f64;
        let scales = (0..k)
            .map(|i| {
                let mean = stats.iter().map(|s| s[i]).sum::<f64>() / n;
                let var = stats.iter().map(|s| (s[i] - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
                if var > 0.0 {
                    var.sqrt()
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Distance::Standardized(scales))
    }
}

/// One prior draw with its simulated statistics and distance to the observation.
#[derive(Clone, Debug)]
pub struct AbcDraw {
    pub theta: ParameterVector,
    pub distance: f64,
}

fn prior_predictive(
    model: &ModelSpec,
    prior: &BoxPrior,
    n: usize,
    pp: &PpSamplerConfig,
    rng: &RngState,
) -> Result<Vec<(ParameterVector, Option<SufficientStatistics>)>> {
    if prior.dim() != model.param_dim() {
        return invalid("prior dimension does not match the model");
    }
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut r = rng.fork(i as u64);
            let theta = prior.sample(&mut r);
            // Draws outside the model domain (e.g. attractive Strauss) simulate nothing.
            let t = simulate_statistics(model, &theta, pp, &mut r).ok();
            Ok((theta, t))
        })
        .collect()
}

/// All `n_draws` prior draws with their distances, in draw order.
pub fn abc_draws(
    model: &ModelSpec,
    t_obs: &SufficientStatistics,
    prior: &BoxPrior,
    n_draws: usize,
    distance: &Distance,
    pp: &PpSamplerConfig,
    rng: &RngState,
) -> Result<Vec<AbcDraw>> {
    validate_statistics(model, t_obs)?;
    Ok(prior_predictive(model, prior, n_draws, pp, rng)?
        .into_iter()
        .map(|(theta, t)| AbcDraw {
            distance: t.map_or(f64::INFINITY, |t| distance.eval(t_obs.values(), t.values())),
            theta,
        })
        .collect())
}

/// Prior draws whose simulated statistics fall within `epsilon` of `t_obs`.
#[allow(clippy::too_many_arguments)]
pub fn abc_rejection(
    model: &ModelSpec,
    t_obs: &SufficientStatistics,
    prior: &BoxPrior,
    epsilon: f64,
    n_draws: usize,
    distance: &Distance,
    pp: &PpSamplerConfig,
    rng: &RngState,
) -> Result<Vec<ParameterVector>> {
    if !(epsilon >= 0.0) {
        return invalid(format!("tolerance must be non-negative, got {epsilon}"));
    }
    Ok(abc_draws(model, t_obs, prior, n_draws, distance, pp, rng)?
        .into_iter()
        .filter(|d| d.distance <= epsilon)
        .map(|d| d.theta)
        .collect())
}

/// The `k` prior draws with statistics nearest to `t_obs`; ties keep draw order.
#[allow(clippy::too_many_arguments)]
pub fn abc_knn(
    model: &ModelSpec,
    t_obs: &SufficientStatistics,
    prior: &BoxPrior,
    k: usize,
    n_draws: usize,
    distance: &Distance,
    pp: &PpSamplerConfig,
    rng: &RngState,
) -> Result<Vec<ParameterVector>> {
    if k == 0 || k > n_draws {
        return invalid(format!("k must lie in [1, {n_draws}], got {k}"));
    }
    let mut draws = abc_draws(model, t_obs, prior, n_draws, distance, pp, rng)?;
    draws.sort_by(|a, b| a.distance.total_cmp(&b.distance));
    draws.truncate(k);
    Ok(draws.into_iter().map(|d| d.theta).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (ModelSpec, SufficientStatistics, BoxPrior) {
        (
            ModelSpec::Gaussian { m: 1000 },
            SufficientStatistics::new(vec![1765.45, 12145.83]),
            BoxPrior::new(vec![0.5, 6.0], vec![3.5, 14.0]).unwrap(),
        )
    }

    #[test]
    fn infinite_tolerance_keeps_everything_and_zero_keeps_nothing() {
        let (m, t, p) = setup();
        let pp = PpSamplerConfig::default();
        let rng = RngState::new(1, 0);
        let all = abc_rejection(&m, &t, &p, f64::INFINITY, 200, &Distance::Euclidean, &pp, &rng).unwrap();
        assert_eq!(all.len(), 200);
        let none = abc_rejection(&m, &t, &p, 0.0, 200, &Distance::Euclidean, &pp, &rng).unwrap();
        assert!(none.is_empty());
        assert!(abc_rejection(&m, &t, &p, -1.0, 10, &Distance::Euclidean, &pp, &rng).is_err());
    }

    #[test]
    fn knn_edge_cases() {
        let (m, t, p) = setup();
        let pp = PpSamplerConfig::default();
        let rng = RngState::new(2, 0);
        assert_eq!(abc_knn(&m, &t, &p, 150, 150, &Distance::Euclidean, &pp, &rng).unwrap().len(), 150);
        let best = abc_knn(&m, &t, &p, 1, 150, &Distance::Euclidean, &pp, &rng).unwrap();
        let draws = abc_draws(&m, &t, &p, 150, &Distance::Euclidean, &pp, &rng).unwrap();
        let argmin = draws.iter().min_by(|a, b| a.distance.total_cmp(&b.distance)).unwrap();
        assert_eq!(best, vec![argmin.theta.clone()]);
        assert!(abc_knn(&m, &t, &p, 0, 150, &Distance::Euclidean, &pp, &rng).is_err());
        assert!(abc_knn(&m, &t, &p, 151, 150, &Distance::Euclidean, &pp, &rng).is_err());
    }

    #[test]
    fn draws_do_not_depend_on_thread_count() {
        let (m, t, p) = setup();
        let pp = PpSamplerConfig::default();
        let rng = RngState::new(3, 0);
        let a = abc_draws(&m, &t, &p, 64, &Distance::Euclidean, &pp, &rng).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| abc_draws(&m, &t, &p, 64, &Distance::Euclidean, &pp, &rng).unwrap());
        assert!(a.iter().zip(&b).all(|(x, y)| x.theta == y.theta && x.distance == y.distance));
    }

    #[test]
    fn standardized_distance_scales_coordinates() {
        let d = Distance::Standardized(vec![2.0, 10.0]);
        assert!((d.eval(&[0.0, 0.0], &[2.0, 10.0]) - 2f64.sqrt()).abs() < 1e-15);
    }
}
