//! Riemannian metrics derived from a diffusion tensor.

use serde::{Deserialize, Serialize};

use super::anisotropy::{Activation, AnisotropyMeasure};
use super::spd::{SpdTensor, Vec3};
use crate::error::{Error, Result};

/// Parameters of the anisotropy-scaled metric `g = max(β, floor)^-p · D^-n`
/// with `β = activation(anisotropy(D))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BetaScaled {
    pub p: u32,
    pub n: u32,
    pub activation: Activation,
    pub anisotropy: AnisotropyMeasure,
    pub beta_floor: f64,
}

impl Default for BetaScaled {
    fn default() -> Self {
        Self {
            p: 2,
            n: 2,
            activation: Activation::S1,
            anisotropy: AnisotropyMeasure::Ha,
            beta_floor: 1e-3,
        }
    }
}

impl BetaScaled {
    pub fn with_p(p: u32) -> Self {
        Self { p, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 1 || self.n < 1 {
            return Err(Error::InvalidParameter(format!(
                "beta-scaled metric needs p >= 1 and n >= 1 (got p = {}, n = {})",
                self.p, self.n
            )));
        }
        if !matches!(self.anisotropy, AnisotropyMeasure::Ha | AnisotropyMeasure::Fa) {
            return Err(Error::InvalidParameter(format!(
                "beta-scaled metric supports HA or FA, not {}",
                self.anisotropy.name()
            )));
        }
        if !(self.beta_floor > 0.0 && self.beta_floor.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "beta_floor must be positive (got {})",
                self.beta_floor
            )));
        }
        Ok(())
    }

    /// Unclamped β for the given eigenvalues.
    pub fn beta(&self, eigenvalues: &[f64]) -> f64 {
        self.activation.apply(self.anisotropy.of_eigenvalues(eigenvalues))
    }

    /// Conformal factor `max(β, floor)^-p`.
    pub fn conformal_factor(&self, eigenvalues: &[f64]) -> f64 {
        self.beta(eigenvalues).max(self.beta_floor).powi(-(self.p as i32))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MetricScheme {
    /// `D⁻¹`
    Inverse,
    /// `det(D)·D⁻¹`
    Adjugate,
    BetaScaled(BetaScaled),
}

impl Default for MetricScheme {
    fn default() -> Self {
        Self::BetaScaled(BetaScaled::default())
    }
}

impl MetricScheme {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::BetaScaled(b) => b.validate(),
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Inverse => "inverse".into(),
            Self::Adjugate => "adjugate".into(),
            Self::BetaScaled(b) => format!("beta_p{}", b.p),
        }
    }
}

pub fn adjugate(t: &SpdTensor) -> SpdTensor {
    let eig = t.eig();
    let det: f64 = eig.eigenvalues().iter().product();
    SpdTensor::from_trusted(t.dim(), eig.compose(|l| det / l))
}

/// Metric tensor for diffusion tensor `d`. All three schemes share the
/// eigenvectors of `d`, with the eigenvalue order reversed.
pub fn metric_from_tensor(d: &SpdTensor, scheme: &MetricScheme) -> SpdTensor {
    let eig = d.eig();
    let m = match scheme {
        MetricScheme::Inverse => eig.compose(|l| 1.0 / l),
        MetricScheme::Adjugate => {
            let det: f64 = eig.eigenvalues().iter().product();
            eig.compose(|l| det / l)
        }
        MetricScheme::BetaScaled(b) => {
            let c = b.conformal_factor(eig.eigenvalues());
            let n = b.n as i32;
            eig.compose(|l| c * l.powi(-n))
        }
    };
    SpdTensor::from_trusted(d.dim(), m)
}

/// Squared Riemannian length of the unit vector along `v`: `v̂ᵀ g v̂`.
pub fn directional_cost(g: &SpdTensor, v: &Vec3) -> f64 {
    g.quad(v) / v.norm_squared()
}
