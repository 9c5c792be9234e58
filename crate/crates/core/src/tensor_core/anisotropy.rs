use serde::{Deserialize, Serialize};

use super::spd::SpdTensor;

/// Scalar summaries of a diffusion tensor's shape and size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnisotropyMeasure {
    /// Hilbert anisotropy, `log(λmax / λmin)`.
    Ha,
    /// Fractional anisotropy.
    Fa,
    /// Mean diffusivity.
    Md,
    /// Relative anisotropy (standard deviation of the eigenvalues over their mean).
    Ra,
}

impl AnisotropyMeasure {
    pub const ALL: [AnisotropyMeasure; 4] = [Self::Ha, Self::Fa, Self::Md, Self::Ra];

    pub fn name(self) -> &'static str {
        match self {
            Self::Ha => "HA",
            Self::Fa => "FA",
            Self::Md => "MD",
            Self::Ra => "RA",
        }
    }

    /// Evaluate on eigenvalues (any order, all positive).
    pub fn of_eigenvalues(self, l: &[f64]) -> f64 {
        let n = l.len() as f64;
        let mean = l.iter().sum::<f64>() / n;
        let dev2: f64 = l.iter().map(|x| (x - mean).powi(2)).sum();
        match self {
            Self::Ha => {
                let max = l.iter().copied().fold(f64::MIN, f64::max);
                let min = l.iter().copied().fold(f64::MAX, f64::min);
                (max / min).ln().max(0.0)
            }
            Self::Fa => {
                let norm2: f64 = l.iter().map(|x| x * x).sum();
                (n / (n - 1.0) * dev2 / norm2).sqrt()
            }
            Self::Md => mean,
            Self::Ra => (dev2 / n).sqrt() / mean,
        }
    }
}

pub fn hilbert_anisotropy(t: &SpdTensor) -> f64 {
    anisotropy_scalar(t, AnisotropyMeasure::Ha)
}

pub fn anisotropy_scalar(t: &SpdTensor, measure: AnisotropyMeasure) -> f64 {
    measure.of_eigenvalues(t.eig().eigenvalues())
}

/// Sigmoid-like maps from an anisotropy scalar to the metric scale factor β.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    /// `tanh(x)`
    S1,
    /// `1 / (1 + exp(-x/2))`
    S2,
    /// `x / sqrt(1 + x²)`
    S3,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Self::S1 => x.tanh(),
            Self::S2 => 1.0 / (1.0 + (-0.5 * x).exp()),
            Self::S3 => x / (1.0 + x * x).sqrt(),
        }
    }
}

pub fn activation(x: f64, kind: Activation) -> f64 {
    kind.apply(x)
}
