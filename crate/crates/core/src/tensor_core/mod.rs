//! Diffusion tensors, anisotropy measures and the metrics built from them.

pub mod anisotropy;
pub mod metric;
pub mod spd;

pub use anisotropy::{activation, anisotropy_scalar, hilbert_anisotropy, Activation, AnisotropyMeasure};
pub use metric::{adjugate, directional_cost, metric_from_tensor, BetaScaled, MetricScheme};
pub use spd::{sym_eigen, EigenDecomposition, Mat3, SpdTensor, Vec3};

/// Eigen-decomposition with eigenvalues sorted descending.
pub fn eig_sym(t: &SpdTensor) -> EigenDecomposition {
    t.eig()
}
