//! Plain Metropolis-Hastings on the analytic Gaussian posterior.

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::models::{
    gaussian_log_partition, log_unnormalized_density, validate_statistics, ModelSpec, SufficientStatistics,
};
use crate::param::{box_ball_propose, check_delta, BoxPrior, ParameterVector};
use crate::rng::RngState;

use super::trace::ChainTrace;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectMhConfig {
    /// Side lengths of the uniform proposal box.
    pub widths: Vec<f64>,
    pub iterations: usize,
    pub thinning: usize,
    pub initial: ParameterVector,
    pub prior: BoxPrior,
}

/// `⟨t, η(θ)⟩ − log c(θ)`, or `None` outside the variance domain.
pub fn gaussian_log_posterior(t_obs: &SufficientStatistics, m: usize, theta: &ParameterVector) -> Option<f64> {
    let model = ModelSpec::Gaussian { m };
    let lf = log_unnormalized_density(&model, t_obs, theta).ok()?;
    Some(lf - gaussian_log_partition(theta, m).ok()?)
}

pub fn gaussian_direct_mh(
    t_obs: &SufficientStatistics,
    m: usize,
    config: &DirectMhConfig,
    rng: &mut RngState,
) -> Result<ChainTrace> {
    let model = ModelSpec::Gaussian { m };
    model.validate()?;
    validate_statistics(&model, t_obs)?;
    check_delta(&config.widths, 2)?;
    if config.thinning == 0 {
        return invalid("thinning must be at least 1");
    }
    if config.initial.dim() != 2 || config.prior.dim() != 2 || !config.prior.contains(&config.initial) {
        return invalid("initial state must be a 2-vector inside the prior box");
    }
    let Some(mut lp) = gaussian_log_posterior(t_obs, m, &config.initial) else {
        return invalid("initial variance must be positive");
    };
    let start = Instant::now();
    let mut theta = config.initial.clone();
    let mut samples = Vec::with_capacity(config.iterations / config.thinning);
    let mut accepted = 0u64;
    for it in 0..config.iterations {
        let psi = box_ball_propose(&theta, &config.widths, rng)?;
        if config.prior.contains(&psi) {
            if let Some(lp_psi) = gaussian_log_posterior(t_obs, m, &psi) {
                let log_a = lp_psi - lp;
                if log_a >= 0.0 || rng.random::<f64>() < log_a.exp() {
                    theta = psi;
                    lp = lp_psi;
                    accepted += 1;
                }
            }
        }
        if (it + 1) % config.thinning == 0 {
            samples.push(theta.clone());
        }
    }
    Ok(ChainTrace {
        algorithm: "direct-mh".into(),
        names: model.param_names().iter().map(|s| s.to_string()).collect(),
        samples,
        acceptance_rate: if config.iterations == 0 { 0.0 } else { accepted as f64 / config.iterations as f64 },
        seed: rng.seed(),
        stream: rng.stream(),
        config: serde_json::json!({ "model": model, "t_obs": t_obs, "direct_mh": config }),
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}
