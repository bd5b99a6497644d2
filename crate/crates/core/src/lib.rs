//! ABC Shadow posterior sampling for exponential-family models.
//!
//! The crate bundles everything needed to run the shadow chain on Gaussian,
//! Strauss, Candy and area-interaction models:
//!
//! - [`space`], [`param`], [`rng`]: windows, point patterns, parameter boxes,
//!   the symmetric box proposal and seeded random streams.
//! - [`models`]: natural-parameter maps and sufficient statistics.
//! - [`geometry`]: pair counting, Candy segment connectivity, union-of-disks area.
//! - [`mcmc`]: the point-process birth/death/move sampler, the ABC Shadow
//!   chain, the ideal-chain quadrature check and baseline samplers.
//! - [`summaries`]: K, F, G, J estimators and Monte Carlo envelopes.
//! - [`posterior`]: quantiles, kernel-density MAP and estimation errors.
//! - [`io`]: CSV/JSON encodings shared with the command line runner.
//!
//! ```
//! use abc_shadow::prelude::*;
//!
//! let model = ModelSpec::Gaussian { m: 1000 };
//! let t_obs = SufficientStatistics::new(vec![1765.45, 12145.83]);
//! let config = ShadowConfig {
//!     delta: vec![0.005, 0.025],
//!     inner_steps: 50,
//!     outer_iterations: 20,
//!     burn_in: 0,
//!     thinning: 1,
//!     aux: AuxConfig::default(),
//!     initial: ParameterVector::new(vec![2.0, 9.0]),
//!     prior: BoxPrior::new(vec![-100.0, 0.0], vec![100.0, 200.0]).unwrap(),
//! };
//! let trace = abc_shadow_run(&model, &t_obs, &config, &mut RngState::new(7, 0)).unwrap();
//! assert_eq!(trace.samples.len(), 20);
//! ```

// NaN-rejecting guards are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod io;
pub mod mcmc;
pub mod models;
pub mod param;
pub mod posterior;
pub mod rng;
pub mod space;
pub mod summaries;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::mcmc::abc::{abc_knn, abc_rejection, Distance};
    pub use crate::mcmc::aux::{aux_var_mh, AuxMhConfig};
    pub use crate::mcmc::direct::{gaussian_direct_mh, DirectMhConfig};
    pub use crate::mcmc::ideal::ideal_acceptance_numeric;
    pub use crate::mcmc::pp::{pp_mh_simulate, PpChain, PpSamplerConfig};
    pub use crate::mcmc::shadow::{abc_shadow_run, shadow_acceptance, AuxConfig, ShadowConfig};
    pub use crate::mcmc::trace::ChainTrace;
    pub use crate::models::{
        log_unnormalized_density, natural_parameters, sample_gaussian_exact, sufficient_statistics, CandyParams,
        ModelSpec, Observation, SufficientStatistics,
    };
    pub use crate::param::{box_ball_propose, prior_density, BoxPrior, ParameterVector};
    pub use crate::posterior::{error_estimates, kde_map, summarize, ErrorEstimates, PosteriorSummary};
    pub use crate::rng::RngState;
    pub use crate::space::{MarkedPoint, PointPattern, Window};
    pub use crate::summaries::{envelope_test, estimate_summaries, poisson_theoretical, UGrid};
}
