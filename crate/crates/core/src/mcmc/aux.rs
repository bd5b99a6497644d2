//! Auxiliary-variable Metropolis-Hastings.
//!
//! The state is `(θ, x)`. A move proposes `ψ` from a uniform box and `x'`
//! approximately from `p(·|ψ)`; the auxiliary density is `f(·|θ̂)/c(θ̂)` for a
//! fixed reference `θ̂`, so every normalizing constant cancels.

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::models::{
    dot, gaussian_draw_statistics, natural_parameters, validate_statistics, ModelSpec, SufficientStatistics,
};
use crate::param::{box_ball_propose, check_delta, BoxPrior, ParameterVector};
use crate::rng::RngState;

use super::pp::{PpChain, PpSamplerConfig};
use super::trace::ChainTrace;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuxMhConfig {
    /// Side lengths of the parameter proposal box.
    pub widths: Vec<f64>,
    pub iterations: usize,
    pub thinning: usize,
    pub initial: ParameterVector,
    pub prior: BoxPrior,
    /// Reference parameter of the auxiliary density; the prior centre if absent.
    #[serde(default)]
    pub reference: Option<ParameterVector>,
    #[serde(default)]
    pub aux: PpSamplerConfig,
}

impl AuxMhConfig {
    pub fn validate(&self, model: &ModelSpec) -> Result<()> {
        let r = model.param_dim();
        if self.initial.dim() != r || self.prior.dim() != r {
            return invalid(format!("{} model has {r} parameters", model.name()));
        }
        check_delta(&self.widths, r)?;
        if self.thinning == 0 {
            return invalid("thinning must be at least 1");
        }
        if !self.prior.contains(&self.initial) {
            return invalid("initial state lies outside the prior box");
        }
        natural_parameters(model, &self.initial)?;
        natural_parameters(model, &self.reference())?;
        if model.is_point_process() {
            self.aux.validate()?;
        }
        Ok(())
    }

    pub fn reference(&self) -> ParameterVector {
        self.reference.clone().unwrap_or_else(|| self.prior.center())
    }
}

/// `log H` for the move `(θ, x) → (ψ, x')` under a uniform prior.
///
/// Arguments are natural parameters and statistics; `eta_ref` is `η(θ̂)`.
pub fn aux_log_ratio(
    t_obs: &[f64],
    eta_theta: &[f64],
    eta_psi: &[f64],
    eta_ref: &[f64],
    t_x: &[f64],
    t_x_new: &[f64],
) -> f64 {
    dot(t_obs, eta_psi) - dot(t_obs, eta_theta) + dot(t_x_new, eta_ref) - dot(t_x, eta_ref) + dot(t_x, eta_theta)
        - dot(t_x_new, eta_psi)
}

enum Auxiliary {
    Gaussian { m: usize },
    Pattern { chain: Box<PpChain>, cfg: PpSamplerConfig },
}

pub fn aux_var_mh(
    model: &ModelSpec,
    t_obs: &SufficientStatistics,
    config: &AuxMhConfig,
    rng: &mut RngState,
) -> Result<ChainTrace> {
    model.validate()?;
    config.validate(model)?;
    validate_statistics(model, t_obs)?;
    let start = Instant::now();
    let eta_ref = natural_parameters(model, &config.reference())?;
    let mut theta = config.initial.clone();
    let mut eta_theta = natural_parameters(model, &theta)?;

    let mut aux = match model {
        ModelSpec::Gaussian { m } => Auxiliary::Gaussian { m: *m },
        _ => Auxiliary::Pattern { chain: Box::new(PpChain::empty(model)?), cfg: config.aux.clone() },
    };
    let mut t_x = match &mut aux {
        Auxiliary::Gaussian { m } => gaussian_draw_statistics(&theta, *m, rng)?,
        Auxiliary::Pattern { chain, cfg } => {
            chain.run(&theta, cfg.burn_in_steps(), cfg, rng)?;
            chain.statistics()
        }
    };

    let mut samples = Vec::with_capacity(config.iterations / config.thinning);
    let mut accepted = 0u64;
    for it in 0..config.iterations {
        let psi = box_ball_propose(&theta, &config.widths, rng)?;
        if config.prior.contains(&psi) {
            if let Ok(eta_psi) = natural_parameters(model, &psi) {
                // x' is drawn approximately for point processes: a short run at ψ from x.
                let (t_new, chain_new) = match &aux {
                    Auxiliary::Gaussian { m } => (gaussian_draw_statistics(&psi, *m, rng)?, None),
                    Auxiliary::Pattern { chain, cfg } => {
                        let mut c = chain.clone();
                        c.run(&psi, cfg.sweeps, cfg, rng)?;
                        (c.statistics(), Some(c))
                    }
                };
                let log_h = aux_log_ratio(t_obs.values(), &eta_theta, &eta_psi, &eta_ref, t_x.values(), t_new.values());
                if log_h >= 0.0 || rng.random::<f64>() < log_h.exp() {
                    theta = psi;
                    eta_theta = eta_psi;
                    t_x = t_new;
                    if let (Auxiliary::Pattern { chain, .. }, Some(c)) = (&mut aux, chain_new) {
                        *chain = c;
                    }
                    accepted += 1;
                }
            }
        }
        if (it + 1) % config.thinning == 0 {
            samples.push(theta.clone());
        }
    }

    Ok(ChainTrace {
        algorithm: "aux-mh".into(),
        names: model.param_names().iter().map(|s| s.to_string()).collect(),
        samples,
        acceptance_rate: if config.iterations == 0 { 0.0 } else { accepted as f64 / config.iterations as f64 },
        seed: rng.seed(),
        stream: rng.stream(),
        config: serde_json::json!({ "model": model, "t_obs": t_obs, "aux_mh": config }),
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}
