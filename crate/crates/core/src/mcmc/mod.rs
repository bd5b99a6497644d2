//! Samplers: the point-process birth/death/move chain, the ABC Shadow chain,
//! the ideal-chain quadrature check and the baseline algorithms.

pub mod abc;
pub mod aux;
pub mod direct;
pub mod ideal;
pub mod pp;
pub mod shadow;
pub mod trace;

use crate::error::Result;
use crate::models::{gaussian_draw_statistics, ModelSpec, SufficientStatistics};
use crate::param::ParameterVector;
use crate::rng::RngState;

use pp::{PpChain, PpSamplerConfig};

/// One forward simulation of the model's statistics at `theta`.
///
/// Gaussian draws are exact. Point processes start from the empty pattern
/// and run `burn_factor * sweeps` birth/death/move steps.
pub fn simulate_statistics(
    model: &ModelSpec,
    theta: &ParameterVector,
    pp: &PpSamplerConfig,
    rng: &mut RngState,
) -> Result<SufficientStatistics> {
    match model {
        ModelSpec::Gaussian { m } => gaussian_draw_statistics(theta, *m, rng),
        _ => {
            let mut chain = PpChain::empty(model)?;
            chain.run(theta, pp.burn_in_steps(), pp, rng)?;
            Ok(chain.statistics())
        }
    }
}
