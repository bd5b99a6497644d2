//! Parameter vectors, uniform box priors and the symmetric box proposal.

use std::ops::Index;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A point θ of the parameter space. Serializes as a bare JSON array.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParameterVector(Vec<f64>);

impl ParameterVector {
    pub fn new(values: Vec<f64>) -> Self {
        ParameterVector(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Index<usize> for ParameterVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<Vec<f64>> for ParameterVector {
    fn from(v: Vec<f64>) -> Self {
        ParameterVector(v)
    }
}

/// Uniform prior on `Π [lower[i], upper[i]]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPrior")]
pub struct BoxPrior {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Deserialize)]
struct RawPrior {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl TryFrom<RawPrior> for BoxPrior {
    type Error = crate::Error;

    fn try_from(raw: RawPrior) -> Result<Self> {
        BoxPrior::new(raw.lower, raw.upper)
    }
}

impl BoxPrior {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return invalid(format!("prior bounds have dimensions {} and {}", lower.len(), upper.len()));
        }
        for (i, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if !(l.is_finite() && u.is_finite() && l < u) {
                return invalid(format!("prior bound {i}: need finite lower < upper, got [{l}, {u}]"));
            }
        }
        Ok(BoxPrior { lower, upper })
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn volume(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(l, u)| u - l).product()
    }

    pub fn center(&self) -> ParameterVector {
        ParameterVector(self.lower.iter().zip(&self.upper).map(|(l, u)| 0.5 * (l + u)).collect())
    }

    pub fn contains(&self, theta: &ParameterVector) -> bool {
        theta.dim() == self.dim()
            && theta.values().iter().zip(self.lower.iter().zip(&self.upper)).all(|(v, (l, u))| *v >= *l && *v <= *u)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ParameterVector {
        ParameterVector(self.lower.iter().zip(&self.upper).map(|(l, u)| l + (u - l) * rng.random::<f64>()).collect())
    }
}

/// Density of the uniform box prior at `theta`.
pub fn prior_density(prior: &BoxPrior, theta: &ParameterVector) -> Result<f64> {
    if theta.dim() != prior.dim() {
        return invalid(format!("theta has dimension {}, prior has {}", theta.dim(), prior.dim()));
    }
    Ok(if prior.contains(theta) { 1.0 / prior.volume() } else { 0.0 })
}

/// Uniform draw from the box of side `delta[i]` centred at `center`.
///
/// The kernel is symmetric: ψ lies in the box around θ exactly when θ lies
/// in the box around ψ, so it cancels from every acceptance ratio.
pub fn box_ball_propose<R: Rng + ?Sized>(
    center: &ParameterVector,
    delta: &[f64],
    rng: &mut R,
) -> Result<ParameterVector> {
    check_delta(delta, center.dim())?;
    Ok(ParameterVector(center.values().iter().zip(delta).map(|(c, d)| c + d * (rng.random::<f64>() - 0.5)).collect()))
}

pub(crate) fn check_delta(delta: &[f64], dim: usize) -> Result<()> {
    if delta.len() != dim {
        return invalid(format!("delta has dimension {}, parameter has {dim}", delta.len()));
    }
    if let Some(d) = delta.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
        return invalid(format!("proposal widths must be positive, got {d}"));
    }
    Ok(())
}

/// Membership of `psi` in the closed box of side `delta` around `theta`.
pub fn in_box(theta: &ParameterVector, psi: &ParameterVector, delta: &[f64]) -> bool {
    theta.values().iter().zip(psi.values()).zip(delta).all(|((t, p), d)| (p - t).abs() <= 0.5 * d)
}
