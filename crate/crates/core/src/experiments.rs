//! Numerical experiments behind the command-line tool: cost profiles along
//! interpolation paths, the isotropic-gap comparison and the crossing-angle
//! sweep.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phantom::{fit_tensor4_field, planar_scheme, preset, add_rician, simulate_signal, PresetKind};
use crate::tensor_core::{
    anisotropy_scalar, directional_cost, metric_from_tensor, AnisotropyMeasure, MetricScheme, SpdTensor, Vec3,
};
use crate::tensor_field::{loge_geodesic, sq_geodesic, InterpolationMethod};

/// The three schemes compared throughout, with the default β-scaled setup.
pub fn standard_schemes() -> Vec<MetricScheme> {
    vec![MetricScheme::Inverse, MetricScheme::Adjugate, MetricScheme::default()]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostSample {
    pub t: f64,
    pub ha: f64,
    pub fa: f64,
    /// `v̂ᵀ g v̂` along the principal direction, one entry per scheme.
    pub costs: Vec<f64>,
}

/// Endpoints of the anisotropic to isotropic to anisotropic path: two
/// orthogonal fibers whose log-Euclidean midpoint is isotropic.
pub fn default_cost_path() -> (SpdTensor, SpdTensor) {
    let (a, b): (f64, f64) = (1.7e-3, 0.2e-3);
    let c = (a * b).sqrt();
    (SpdTensor::diag(&[a, b, c]).unwrap(), SpdTensor::diag(&[b, a, c]).unwrap())
}

/// Sample the path from `t1` (t = 0) to `t2` (t = 1) at `n` evenly spaced
/// points and evaluate each scheme's cost there.
pub fn cost_profile(
    t1: &SpdTensor,
    t2: &SpdTensor,
    n: usize,
    schemes: &[MetricScheme],
    method: InterpolationMethod,
) -> Result<Vec<CostSample>> {
    if t1.dim() != t2.dim() {
        return Err(Error::DimensionMismatch { expected: t1.dim(), got: t2.dim() });
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!("cost profile needs at least 2 samples, got {n}")));
    }
    for s in schemes {
        s.validate()?;
    }
    (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            let d = match method {
                InterpolationMethod::Euclidean => SpdTensor::weighted_mean(t1.dim(), [(1.0 - t, t1), (t, t2)]),
                InterpolationMethod::LogEuclidean => loge_geodesic(t2, t1, t),
                InterpolationMethod::SpectralQuaternion => sq_geodesic(t1, t2, t),
            };
            let v = d.eig().principal();
            Ok(CostSample {
                t,
                ha: anisotropy_scalar(&d, AnisotropyMeasure::Ha),
                fa: anisotropy_scalar(&d, AnisotropyMeasure::Fa),
                costs: schemes.iter().map(|s| directional_cost(&metric_from_tensor(&d, s), &v)).collect(),
            })
        })
        .collect()
}

/// Index of the sample with the highest cost for scheme `k`.
pub fn argmax_cost(samples: &[CostSample], k: usize) -> Option<usize> {
    (0..samples.len()).max_by(|&a, &b| samples[a].costs[k].total_cmp(&samples[b].costs[k]))
}

/// Cost of crossing an isotropic gap of diffusivity `lambda` between two
/// fibers, along the fiber direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapCase {
    pub case: usize,
    pub lambda: f64,
    pub cost_inverse: f64,
    pub cost_adjugate: f64,
    pub cost_beta: f64,
    /// The conformal factor `max(β, floor)^-p` on its own.
    pub beta_factor: f64,
}

/// Isotropic gaps with the smaller (case 1) and the larger (case 2) fiber
/// eigenvalue.
pub fn gap_cases(fiber: [f64; 3]) -> Result<Vec<GapCase>> {
    let beta = match MetricScheme::default() {
        MetricScheme::BetaScaled(b) => b,
        _ => unreachable!(),
    };
    [fiber[2], fiber[0]]
        .into_iter()
        .enumerate()
        .map(|(i, lambda)| {
            let d = SpdTensor::scaled_identity(3, lambda);
            let cost = |s: &MetricScheme| directional_cost(&metric_from_tensor(&d, s), &Vec3::x());
            Ok(GapCase {
                case: i + 1,
                lambda,
                cost_inverse: cost(&MetricScheme::Inverse),
                cost_adjugate: cost(&MetricScheme::Adjugate),
                cost_beta: cost(&MetricScheme::BetaScaled(beta)),
                beta_factor: beta.conformal_factor(&[lambda; 3]),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleError {
    pub theta_deg: f64,
    pub err_layer1_deg: f64,
    pub err_layer2_deg: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepParams {
    pub n_gradients: usize,
    pub b: f64,
    pub s0: f64,
    pub noise: f64,
    pub rng_seed: u64,
}

impl Default for SweepParams {
    fn default() -> Self {
        Self { n_gradients: 81, b: 1500.0, s0: 1.0, noise: 0.0, rng_seed: 42 }
    }
}

fn axis_error_deg(a: &Vec3, b: &Vec3) -> f64 {
    a.normalize().dot(&b.normalize()).abs().min(1.0).acos().to_degrees()
}

/// For each crossing angle: build the crossing phantom, simulate and fit
/// fourth-order tensors, and compare the principal axes of the `T_xx` and
/// `T_yy` blocks with the two fibers, averaged over the crossing voxels.
pub fn angle_sweep(thetas: &[f64], params: &SweepParams) -> Result<Vec<AngleError>> {
    let scheme = planar_scheme(params.n_gradients, params.b, params.s0)?;
    thetas
        .iter()
        .map(|&theta| {
            let ph = preset(PresetKind::Cross, theta)?.phantom.rasterize()?;
            let clean = simulate_signal(&ph, &scheme, 4)?;
            let signals = add_rician(&clean, params.noise, params.rng_seed)?;
            let f4 = fit_tensor4_field(&signals, &scheme)?;
            let mut err = [0.0; 2];
            let mut n = 0usize;
            for (i, cov) in ph.coverage.iter().enumerate() {
                if cov.len() != 2 {
                    continue;
                }
                let comps = f4.data()[i].diagonal_components()?;
                for (layer, e) in err.iter_mut().enumerate() {
                    *e += axis_error_deg(&comps[layer].eig().principal(), &cov[layer].1);
                }
                n += 1;
            }
            if n == 0 {
                return Err(Error::InvalidParameter(format!("crossing at {theta}° has no shared voxels")));
            }
            Ok(AngleError { theta_deg: theta, err_layer1_deg: err[0] / n as f64, err_layer2_deg: err[1] / n as f64 })
        })
        .collect()
}

/// 40° to 110° in 10° steps.
pub fn default_angles() -> Vec<f64> {
    (4..=11).map(|k| k as f64 * 10.0).collect()
}
