//! Ideal-chain acceptance by quadrature, for the Gaussian model.
//!
//! The ideal proposal normalizes `f(x|φ)/c(φ)` over the box around the
//! current state. Its acceptance differs from the shadow acceptance by the
//! factor `I(θ)/I(ψ)`, where `I(θ) = ∫_{box(θ)} f(x|φ)/c(φ) dφ`. For the
//! Gaussian, `c` is known in closed form, so `I` can be computed by midpoint
//! quadrature.

use crate::error::{invalid, Error, Result};
use crate::models::{gaussian_log_partition, natural_parameters, ModelSpec, SufficientStatistics};
use crate::param::{check_delta, in_box, prior_density, BoxPrior, ParameterVector};

use super::shadow::{log_shadow_ratio, truncate};

/// `log ∫_{box(center, delta)} f(x|φ)/c(φ) dφ` on a `cells × cells` midpoint grid.
pub fn log_box_integral(
    m: usize,
    t_aux: &SufficientStatistics,
    center: &ParameterVector,
    delta: &[f64],
    cells: usize,
) -> Result<f64> {
    if cells == 0 {
        return invalid("quadrature needs at least one cell per side");
    }
    let model = ModelSpec::Gaussian { m };
    let (h0, h1) = (delta[0] / cells as f64, delta[1] / cells as f64);
    let mut terms = Vec::with_capacity(cells * cells);
    for i in 0..cells {
        for j in 0..cells {
            let phi = ParameterVector::new(vec![
                center[0] - 0.5 * delta[0] + (i as f64 + 0.5) * h0,
                center[1] - 0.5 * delta[1] + (j as f64 + 0.5) * h1,
            ]);
            if phi[1] <= 0.0 {
                continue;
            }
            let eta = natural_parameters(&model, &phi)?;
            let lp = t_aux.values()[0] * eta[0] + t_aux.values()[1] * eta[1] - gaussian_log_partition(&phi, m)?;
            terms.push(lp);
        }
    }
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Ok(f64::NEG_INFINITY);
    }
    let sum: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    Ok(max + sum.ln() + (h0 * h1).ln())
}

/// Ideal-chain acceptance `α_i(θ → ψ)` given auxiliary statistics `t_aux`.
#[allow(clippy::too_many_arguments)]
pub fn ideal_acceptance_numeric(
    model: &ModelSpec,
    t_obs: &SufficientStatistics,
    t_aux: &SufficientStatistics,
    theta: &ParameterVector,
    psi: &ParameterVector,
    delta: &[f64],
    prior: &BoxPrior,
    cells: usize,
) -> Result<f64> {
    let ModelSpec::Gaussian { m } = model else {
        return Err(Error::Unsupported(format!(
            "ideal acceptance needs a closed-form normalizing constant; {} has none",
            model.name()
        )));
    };
    check_delta(delta, 2)?;
    if !in_box(theta, psi, delta) {
        return invalid("psi must lie in the proposal box around theta");
    }
    let p_theta = prior_density(prior, theta)?;
    let p_psi = prior_density(prior, psi)?;
    if p_theta <= 0.0 {
        return invalid("theta lies outside the prior box");
    }
    if p_psi <= 0.0 {
        return Ok(0.0);
    }
    let eta_theta = natural_parameters(model, theta)?;
    let Ok(eta_psi) = natural_parameters(model, psi) else {
        return Ok(0.0);
    };
    let diff: Vec<f64> = t_obs.values().iter().zip(t_aux.values()).map(|(a, b)| a - b).collect();
    let log_i_theta = log_box_integral(*m, t_aux, theta, delta, cells)?;
    let log_i_psi = log_box_integral(*m, t_aux, psi, delta, cells)?;
    let log_a = log_shadow_ratio(&eta_theta, &eta_psi, &diff) + (p_psi / p_theta).ln() + log_i_theta - log_i_psi;
    Ok(truncate(log_a))
}
