//! The ABC Shadow chain.
//!
//! Each outer iteration refreshes an auxiliary configuration `x` at the
//! current parameter, then runs `n` uniform-box Metropolis steps whose
//! acceptance uses only `⟨η(ψ) − η(θ), t(y) − t(x)⟩` and the prior ratio.
//! The last state of the inner run is the emitted sample.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::models::{
    gaussian_draw_statistics, natural_parameters, validate_statistics, ModelSpec, SufficientStatistics,
};
use crate::param::{box_ball_propose, check_delta, prior_density, BoxPrior, ParameterVector};
use crate::rng::RngState;

use super::pp::{PpChain, PpSamplerConfig};
use super::trace::ChainTrace;

/// Auxiliary sampler settings (point-process models only).
pub type AuxConfig = PpSamplerConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShadowConfig {
    /// Side lengths of the proposal box around the current state.
    pub delta: Vec<f64>,
    /// Inner steps per auxiliary refresh.
    pub inner_steps: usize,
    pub outer_iterations: usize,
    /// Outer iterations run before `outer_iterations` and never recorded.
    #[serde(default)]
    pub burn_in: usize,
    /// Keep one emitted state every `thinning` outer iterations.
    pub thinning: usize,
    #[serde(default)]
    pub aux: AuxConfig,
    pub initial: ParameterVector,
    pub prior: BoxPrior,
}

impl ShadowConfig {
    pub fn validate(&self, model: &ModelSpec) -> Result<()> {
        let r = model.param_dim();
        if self.initial.dim() != r || self.prior.dim() != r {
            return invalid(format!(
                "{} model has {r} parameters; initial has {}, prior has {}",
                model.name(),
                self.initial.dim(),
                self.prior.dim()
            ));
        }
        check_delta(&self.delta, r)?;
        if self.inner_steps == 0 {
            return invalid("inner_steps must be at least 1");
        }
        if self.thinning == 0 {
            return invalid("thinning must be at least 1");
        }
        if !self.prior.contains(&self.initial) {
            return invalid(format!("initial state {:?} lies outside the prior box", self.initial.values()));
        }
        natural_parameters(model, &self.initial)?;
        if model.is_point_process() {
            self.aux.validate()?;
        }
        Ok(())
    }
}

/// `log α_s` for a uniform prior, before truncation.
#[inline]
pub(crate) fn log_shadow_ratio(eta_theta: &[f64], eta_psi: &[f64], stat_diff: &[f64]) -> f64 {
    eta_psi.iter().zip(eta_theta).zip(stat_diff).map(|((p, t), d)| (p - t) * d).sum()
}

/// `min{1, exp⟨η(ψ) − η(θ), t_obs − t_aux⟩ · p(ψ)/p(θ)}`.
///
/// Returns 0 when ψ lies outside the prior box or the model domain.
pub fn shadow_acceptance(
    model: &ModelSpec,
    t_obs: &SufficientStatistics,
    t_aux: &SufficientStatistics,
    theta: &ParameterVector,
    psi: &ParameterVector,
    prior: &BoxPrior,
) -> Result<f64> {
    let p_theta = prior_density(prior, theta)?;
    if p_theta <= 0.0 {
        return invalid(format!("current state {:?} lies outside the prior box", theta.values()));
    }
    let p_psi = prior_density(prior, psi)?;
    if p_psi <= 0.0 {
        return Ok(0.0);
    }
    let eta_theta = natural_parameters(model, theta)?;
    let Ok(eta_psi) = natural_parameters(model, psi) else {
        return Ok(0.0);
    };
    if t_obs.len() != eta_theta.len() || t_aux.len() != eta_theta.len() {
        return invalid("statistic lengths do not match the model");
    }
    let diff: Vec<f64> = t_obs.values().iter().zip(t_aux.values()).map(|(a, b)| a - b).collect();
    let log_a = log_shadow_ratio(&eta_theta, &eta_psi, &diff) + (p_psi / p_theta).ln();
    Ok(truncate(log_a))
}

pub(crate) fn truncate(log_a: f64) -> f64 {
    if log_a.is_nan() {
        0.0
    } else if log_a >= 0.0 {
        1.0
    } else {
        log_a.exp()
    }
}

/// Source of auxiliary statistics at the current parameter.
pub(crate) enum AuxSource {
    Gaussian { m: usize },
    Pattern { chain: Box<PpChain>, cfg: PpSamplerConfig, warm: bool },
}

impl AuxSource {
    pub(crate) fn new(model: &ModelSpec, cfg: &PpSamplerConfig) -> Result<Self> {
        Ok(match model {
            ModelSpec::Gaussian { m } => AuxSource::Gaussian { m: *m },
            _ => AuxSource::Pattern { chain: Box::new(PpChain::empty(model)?), cfg: cfg.clone(), warm: false },
        })
    }

    /// Exact draw for the Gaussian; otherwise `sweeps` steps from the previous
    /// auxiliary pattern (the first call grows it from empty with the burn-in).
    pub(crate) fn refresh(&mut self, theta: &ParameterVector, rng: &mut RngState) -> Result<SufficientStatistics> {
        match self {
            AuxSource::Gaussian { m } => gaussian_draw_statistics(theta, *m, rng),
            AuxSource::Pattern { chain, cfg, warm } => {
                let steps = if *warm { cfg.sweeps } else { cfg.burn_in_steps() };
                chain.run(theta, steps, cfg, rng)?;
                *warm = true;
                Ok(chain.statistics())
            }
        }
    }
}

pub fn abc_shadow_run(
    model: &ModelSpec,
    t_obs: &SufficientStatistics,
    config: &ShadowConfig,
    rng: &mut RngState,
) -> Result<ChainTrace> {
    model.validate()?;
    config.validate(model)?;
    validate_statistics(model, t_obs)?;
    let start = Instant::now();
    let mut aux = AuxSource::new(model, &config.aux)?;
    let mut theta = config.initial.clone();
    let mut eta_theta = natural_parameters(model, &theta)?;
    let mut samples = Vec::with_capacity(config.outer_iterations / config.thinning);
    let (mut proposed, mut accepted) = (0u64, 0u64);
    let mut diff = vec![0.0; t_obs.len()];

    for outer in 0..config.burn_in + config.outer_iterations {
        let t_aux = aux.refresh(&theta, rng)?;
        for (d, (o, a)) in diff.iter_mut().zip(t_obs.values().iter().zip(t_aux.values())) {
            *d = o - a;
        }
        for _ in 0..config.inner_steps {
            proposed += 1;
            let psi = box_ball_propose(&theta, &config.delta, rng)?;
            if !config.prior.contains(&psi) {
                continue;
            }
            let Ok(eta_psi) = natural_parameters(model, &psi) else {
                continue;
            };
            let log_a = log_shadow_ratio(&eta_theta, &eta_psi, &diff);
            if log_a >= 0.0 || rand::Rng::random::<f64>(rng) < log_a.exp() {
                theta = psi;
                eta_theta = eta_psi;
                accepted += 1;
            }
        }
        let kept = outer + 1;
        if kept > config.burn_in && (kept - config.burn_in).is_multiple_of(config.thinning) {
            samples.push(theta.clone());
        }
    }

    Ok(ChainTrace {
        algorithm: "abc-shadow".into(),
        names: model.param_names().iter().map(|s| s.to_string()).collect(),
        samples,
        acceptance_rate: if proposed == 0 { 0.0 } else { accepted as f64 / proposed as f64 },
        seed: rng.seed(),
        stream: rng.stream(),
        config: serde_json::json!({ "model": model, "t_obs": t_obs, "shadow": config }),
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}
