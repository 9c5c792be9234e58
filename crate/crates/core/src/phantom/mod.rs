//! Synthetic ground truth: fiber geometries rasterised into tensor fields,
//! diffusion-weighted signals, Rician noise and tensor re-fitting.

mod presets;
mod shapes;

use std::path::Path;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesic::GeodesicTrack;
use crate::io::{field_files, FileSet, SignalVolume};
use crate::lsq::LeastSquares;
use crate::tensor4::{log_attenuation, Tensor4, Tensor4Field, Tensor4Fitter};
use crate::tensor_core::spd::{check_dim, unique_pairs};
use crate::tensor_core::{sym_eigen, Mat3, SpdTensor, Vec3};
use crate::tensor_field::{Grid, TensorField};

pub use presets::{preset, Preset, PresetKind};
pub use shapes::{Curve, Shape};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcquisitionScheme {
    pub b: f64,
    #[serde(rename = "S0")]
    pub s0: f64,
    pub gradients: Vec<[f64; 3]>,
}

impl AcquisitionScheme {
    pub fn validate(&self) -> Result<()> {
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(Error::InvalidParameter(format!("b-value must be positive, got {}", self.b)));
        }
        if !(self.s0 > 0.0 && self.s0.is_finite()) {
            return Err(Error::InvalidParameter(format!("S0 must be positive, got {}", self.s0)));
        }
        if let Some(g) = self.gradients.iter().find(|g| (Vec3::from(**g).norm() - 1.0).abs() > 1e-9) {
            return Err(Error::InvalidParameter(format!("gradient {g:?} is not unit length")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.gradients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gradients.is_empty()
    }
}

const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

/// `n` directions on a Fibonacci sphere. Directions `i` and `n − 1 − i` sit
/// at opposite heights, so the set is balanced between hemispheres.
pub fn gradient_scheme(n: usize, b: f64, s0: f64) -> Result<AcquisitionScheme> {
    if n < 6 {
        return Err(Error::InvalidParameter(format!("need at least 6 gradients, got {n}")));
    }
    let gradients = (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = i as f64 * GOLDEN_ANGLE;
            let v = Vec3::new(r * phi.cos(), r * phi.sin(), z).normalize();
            [v.x, v.y, v.z]
        })
        .collect();
    let s = AcquisitionScheme { b, s0, gradients };
    s.validate()?;
    Ok(s)
}

/// `n` in-plane directions at angles `kπ/n`, for planar phantoms.
pub fn planar_scheme(n: usize, b: f64, s0: f64) -> Result<AcquisitionScheme> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("need at least 3 planar gradients, got {n}")));
    }
    let gradients = (0..n)
        .map(|k| {
            let a = k as f64 * std::f64::consts::PI / n as f64;
            [a.cos(), a.sin(), 0.0]
        })
        .collect();
    let s = AcquisitionScheme { b, s0, gradients };
    s.validate()?;
    Ok(s)
}

pub const DEFAULT_EIGENVALUES: [f64; 3] = [1.7e-3, 0.2e-3, 0.2e-3];
pub const DEFAULT_BACKGROUND: f64 = 0.7e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberSpec {
    #[serde(flatten)]
    pub shape: Shape,
    /// Fiber diameter in voxels.
    #[serde(default = "default_thickness")]
    pub thickness: f64,
    #[serde(default = "default_eigenvalues")]
    pub eigenvalues: [f64; 3],
}

fn default_thickness() -> f64 {
    5.0
}

fn default_eigenvalues() -> [f64; 3] {
    DEFAULT_EIGENVALUES
}

impl FiberSpec {
    pub fn new(shape: Shape) -> Self {
        Self { shape, thickness: default_thickness(), eigenvalues: DEFAULT_EIGENVALUES }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let l = &self.eigenvalues[..dim];
        if !(l.windows(2).all(|w| w[0] >= w[1]) && l[dim - 1] > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "fiber eigenvalues must satisfy λ1 ≥ λ2 ≥ λ3 > 0, got {:?}",
                self.eigenvalues
            )));
        }
        if !(self.thickness >= 1.0) {
            return Err(Error::InvalidParameter(format!("thickness must be at least 1 voxel, got {}", self.thickness)));
        }
        Ok(())
    }

    /// Diffusion tensor of this fiber with its principal axis along `t`.
    pub fn tensor(&self, dim: usize, t: &Vec3) -> Result<SpdTensor> {
        SpdTensor::from_eigen(dim, &self.eigenvalues[..dim], &frame_from(dim, t))
    }

    /// Fourth-order profile `(gᵀDg)² / λ1`, equal to `λ1` along the fiber.
    pub fn quartic(&self, dim: usize, t: &Vec3) -> Result<Tensor4> {
        let d = self.tensor(dim, t)?;
        Ok(Tensor4::sym_product(&d, &d)?.scale(1.0 / self.eigenvalues[0]))
    }
}

fn frame_from(dim: usize, t: &Vec3) -> Mat3 {
    let a = t.normalize();
    if dim == 2 {
        return Mat3::from_columns(&[a, Vec3::new(-a.y, a.x, 0.0), Vec3::zeros()]);
    }
    let helper = if a.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let b = a.cross(&helper).normalize();
    Mat3::from_columns(&[a, b, a.cross(&b)])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhantomSpec {
    pub grid: Grid,
    pub fibers: Vec<FiberSpec>,
    #[serde(default = "default_background")]
    pub background: f64,
}

fn default_background() -> f64 {
    DEFAULT_BACKGROUND
}

impl PhantomSpec {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.fibers.is_empty() {
            return Err(Error::InvalidParameter("phantom needs at least one fiber".into()));
        }
        for f in &self.fibers {
            f.validate(self.grid.dim)?;
        }
        if !(self.background > 0.0 && self.background.is_finite()) {
            return Err(Error::InvalidParameter(format!("background diffusivity must be positive, got {}", self.background)));
        }
        Ok(())
    }

    pub fn rasterize(&self) -> Result<Phantom> {
        rasterize(&self.fibers, &self.grid, self.background)
    }
}

/// Ground-truth phantom.
#[derive(Clone, Debug, PartialEq)]
pub struct Phantom {
    pub dt_field: TensorField,
    pub fibers: Vec<FiberSpec>,
    pub background: f64,
    /// Per voxel: `(fiber index, unit tangent)` of every fiber covering it.
    pub coverage: Vec<Vec<(usize, Vec3)>>,
    pub curves: Vec<Curve>,
}

/// Paint fibers onto `grid`: voxels within half the thickness of a curve take
/// that fiber's tensor aligned with the nearest tangent; voxels under several
/// fibers average their tensors; the rest are isotropic.
pub fn rasterize(specs: &[FiberSpec], grid: &Grid, background: f64) -> Result<Phantom> {
    let spec = PhantomSpec { grid: grid.clone(), fibers: specs.to_vec(), background };
    spec.validate()?;
    let dim = grid.dim;
    let unit = grid.spacing.iter().copied().fold(f64::MAX, f64::min);
    let curves = specs.iter().map(|f| f.shape.sample(0.02 * unit)).collect::<Result<Vec<_>>>()?;
    let coverage: Vec<Vec<(usize, Vec3)>> = crate::par::map_range(grid.n_voxels(), |i| {
        let p = grid.center(grid.voxel(i));
        curves
            .iter()
            .zip(specs)
            .enumerate()
            .filter_map(|(k, (c, s))| {
                let (d, t) = c.nearest(&p);
                (d <= 0.5 * s.thickness * unit).then_some((k, t))
            })
            .collect()
    });
    for (k, _) in specs.iter().enumerate() {
        if !coverage.iter().any(|c| c.iter().any(|(f, _)| *f == k)) {
            return Err(Error::DegenerateCurve(format!("fiber {k} does not cover any voxel")));
        }
    }
    let bg = SpdTensor::scaled_identity(dim, background);
    let data = coverage
        .iter()
        .map(|cov| {
            if cov.is_empty() {
                return Ok(bg);
            }
            let ts = cov.iter().map(|(k, t)| specs[*k].tensor(dim, t)).collect::<Result<Vec<_>>>()?;
            Ok(SpdTensor::weighted_mean(dim, ts.iter().map(|t| (1.0, t))))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Phantom {
        dt_field: TensorField::new(grid.clone(), data)?,
        fibers: specs.to_vec(),
        background,
        coverage,
        curves,
    })
}

impl Phantom {
    pub fn grid(&self) -> &Grid {
        self.dt_field.grid()
    }

    pub fn dim(&self) -> usize {
        self.grid().dim
    }

    /// Per-voxel fourth-order tensors: the mean of the covering fibers'
    /// quartic profiles, or the isotropic background.
    pub fn t4_field(&self) -> Result<Tensor4Field> {
        let dim = self.dim();
        let bg = Tensor4::isotropic(dim, self.background)?;
        let data = self
            .coverage
            .iter()
            .map(|cov| {
                if cov.is_empty() {
                    return Ok(bg);
                }
                let mut acc = Tensor4::zeros(dim)?;
                for (k, t) in cov {
                    acc = acc.add(&self.fibers[*k].quartic(dim, t)?)?;
                }
                Ok(acc.scale(1.0 / cov.len() as f64))
            })
            .collect::<Result<Vec<_>>>()?;
        Tensor4Field::new(self.grid().clone(), data)
    }

    /// Voxel indices covered by fiber `k`.
    pub fn mask(&self, k: usize) -> Vec<usize> {
        (0..self.coverage.len()).filter(|&i| self.coverage[i].iter().any(|(f, _)| *f == k)).collect()
    }

    /// Ground-truth tangent at the voxel nearest to `p`, when exactly one
    /// fiber covers it.
    pub fn truth_tangent(&self, p: &Vec3) -> Option<Vec3> {
        let g = self.grid();
        if !g.contains(p) {
            return None;
        }
        let mut ijk = [0; 3];
        for a in 0..g.dim {
            ijk[a] = ((p[a] - g.origin[a]) / g.spacing[a]).round() as usize;
        }
        match self.coverage[g.index(ijk)].as_slice() {
            [(_, t)] => Some(*t),
            _ => None,
        }
    }

    /// Mean angle in degrees between track directions and the ground-truth
    /// tangent, over vertices on single-fiber voxels.
    pub fn mean_angular_deviation(&self, tracks: &[GeodesicTrack]) -> Option<f64> {
        let mut sum = 0.0;
        let mut n = 0usize;
        for t in tracks {
            for (v, d) in t.vertices.iter().zip(&t.directions) {
                if let Some(truth) = self.truth_tangent(v) {
                    sum += d.dot(&truth).abs().min(1.0).acos().to_degrees();
                    n += 1;
                }
            }
        }
        (n > 0).then(|| sum / n as f64)
    }

    /// Field file `dt.json` plus `truth.json` with the fiber specs, per-voxel
    /// tangents and per-fiber masks.
    pub fn bundle_files(&self, dir: &Path, encoding: crate::io::Encoding) -> Result<FileSet> {
        let mut files = field_files(&dir.join("dt.json"), &self.dt_field, encoding)?;
        let truth = serde_json::json!({
            "grid": self.grid(),
            "background": self.background,
            "fibers": self.fibers,
            "tangents": self.coverage.iter().map(|c| c.iter().map(|(_, t)| [t.x, t.y, t.z]).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "masks": (0..self.fibers.len()).map(|k| self.mask(k)).collect::<Vec<_>>(),
        });
        let mut bytes = serde_json::to_vec(&truth)?;
        bytes.push(b'\n');
        files.push((dir.join("truth.json"), bytes));
        Ok(files)
    }
}

/// Noise-free signals `S0·exp(−b·D(g))` from the order-2 or order-4 model.
pub fn simulate_signal(phantom: &Phantom, scheme: &AcquisitionScheme, order: u8) -> Result<SignalVolume> {
    scheme.validate()?;
    let n = scheme.len();
    let grads: Vec<Vec3> = scheme.gradients.iter().map(|g| Vec3::from(*g)).collect();
    let profiles: Vec<Vec<f64>> = match order {
        2 => phantom
            .dt_field
            .data()
            .iter()
            .map(|d| grads.iter().map(|g| d.quad(g)).collect())
            .collect(),
        4 => phantom.t4_field()?.data().iter().map(|t| grads.iter().map(|g| t.d_of_g(g)).collect()).collect(),
        _ => return Err(Error::InvalidParameter(format!("signal model order must be 2 or 4, got {order}"))),
    };
    let values = profiles
        .iter()
        .flat_map(|p| p.iter().map(|d| scheme.s0 * (-scheme.b * d).exp()))
        .collect();
    Ok(SignalVolume { grid: phantom.grid().clone(), n_gradients: n, values })
}

/// Rician magnitude noise `√((S + n₁)² + n₂²)`, `n₁, n₂ ~ N(0, σ²)`. Each
/// voxel draws from its own stream of a generator seeded with `seed`, so the
/// result does not depend on evaluation order.
pub fn add_rician(signals: &SignalVolume, sigma: f64, seed: u64) -> Result<SignalVolume> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise sigma must be non-negative, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(signals.clone());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let n = signals.n_gradients;
    let voxels = crate::par::map_range(signals.grid.n_voxels(), |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        signals
            .voxel(i)
            .iter()
            .map(|s| {
                let (a, b) = (normal.sample(&mut rng), normal.sample(&mut rng));
                ((s + a).powi(2) + b * b).sqrt()
            })
            .collect::<Vec<_>>()
    });
    Ok(SignalVolume { grid: signals.grid.clone(), n_gradients: n, values: voxels.concat() })
}

/// Log-linear least-squares fit of second-order tensors.
#[derive(Clone, Debug)]
pub struct DtiFitter {
    dim: usize,
    b: f64,
    s0: f64,
    solver: LeastSquares,
}

impl DtiFitter {
    pub fn new(scheme: &AcquisitionScheme, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        scheme.validate()?;
        let pairs = unique_pairs(dim);
        let design = DMatrix::from_fn(scheme.len(), pairs.len(), |r, c| {
            let g = scheme.gradients[r];
            let (i, j) = pairs[c];
            if i == j {
                g[i] * g[j]
            } else {
                2.0 * g[i] * g[j]
            }
        });
        Ok(Self { dim, b: scheme.b, s0: scheme.s0, solver: LeastSquares::new(design)? })
    }

    /// Signals are clamped to `1e-6·S0` before the logarithm; eigenvalues of
    /// the fit are clamped to `1e-12`.
    pub fn fit_with_s0(&self, signals: &[f64], s0: f64) -> Result<SpdTensor> {
        let floor = 1e-6 * s0;
        let clamped: Vec<f64> = signals.iter().map(|s| if s.is_nan() { *s } else { s.max(floor) }).collect();
        let y = log_attenuation(&clamped, s0, self.b)?;
        let x = self.solver.solve(&y);
        let mut m = Mat3::zeros();
        for (k, &(i, j)) in unique_pairs(self.dim).iter().enumerate() {
            m[(i, j)] = x[k];
            m[(j, i)] = x[k];
        }
        let e = sym_eigen(self.dim, &m);
        let vals: Vec<f64> = e.eigenvalues().iter().map(|l| l.max(1e-12)).collect();
        SpdTensor::from_eigen(self.dim, &vals, &e.vectors)
    }

    pub fn fit(&self, signals: &[f64]) -> Result<SpdTensor> {
        self.fit_with_s0(signals, self.s0)
    }
}

fn check_signals(signals: &SignalVolume, scheme: &AcquisitionScheme) -> Result<()> {
    if signals.n_gradients != scheme.len() {
        return Err(Error::InvalidParameter(format!(
            "signal volume has {} gradients, scheme has {}",
            signals.n_gradients,
            scheme.len()
        )));
    }
    Ok(())
}

pub fn fit_dti(signals: &SignalVolume, scheme: &AcquisitionScheme) -> Result<TensorField> {
    check_signals(signals, scheme)?;
    let fitter = DtiFitter::new(scheme, signals.grid.dim)?;
    let data = crate::par::map_range(signals.grid.n_voxels(), |i| fitter.fit(signals.voxel(i)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    TensorField::new(signals.grid.clone(), data)
}

/// Fourth-order fit of every voxel. Signals are clamped like [`fit_dti`].
pub fn fit_tensor4_field(signals: &SignalVolume, scheme: &AcquisitionScheme) -> Result<Tensor4Field> {
    check_signals(signals, scheme)?;
    let fitter = Tensor4Fitter::new(scheme, signals.grid.dim)?;
    let floor = 1e-6 * scheme.s0;
    let data = crate::par::map_range(signals.grid.n_voxels(), |i| {
        let s: Vec<f64> = signals.voxel(i).iter().map(|s| s.max(floor)).collect();
        fitter.fit(&s)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Tensor4Field::new(signals.grid.clone(), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor_core::{anisotropy_scalar, AnisotropyMeasure};

    fn line_phantom() -> Phantom {
        let grid = Grid::unit(&[20, 12]).unwrap();
        let f = FiberSpec::new(Shape::Line { start: [1.0, 6.0, 0.0], end: [18.0, 6.0, 0.0] });
        rasterize(&[f], &grid, DEFAULT_BACKGROUND).unwrap()
    }

    #[test]
    fn scheme_shape() {
        let s = gradient_scheme(81, 1500.0, 1.0).unwrap();
        assert_eq!(s.len(), 81);
        let g: Vec<Vec3> = s.gradients.iter().map(|g| Vec3::from(*g)).collect();
        assert!(g.iter().all(|v| (v.norm() - 1.0).abs() < 1e-12));
        let mut min = f64::MAX;
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                min = min.min(g[i].dot(&g[j]).clamp(-1.0, 1.0).acos().to_degrees());
            }
        }
        assert!(min > 10.0, "{min}");
        let json = serde_json::to_value(&s).unwrap();
        assert_eq!(json["S0"], 1.0);
        assert!(gradient_scheme(5, 1500.0, 1.0).is_err());
    }

    #[test]
    fn line_voxels_follow_tangent() {
        let p = line_phantom();
        let on = p.dt_field.at([10, 6, 0]).eig();
        assert!((on.principal().x.abs() - 1.0).abs() < 1e-12);
        assert!((on.max() - 1.7e-3).abs() < 1e-15);
        let off = p.dt_field.at([10, 0, 0]);
        assert_eq!(anisotropy_scalar(off, AnisotropyMeasure::Fa), 0.0);
        assert_eq!(p.mask(0).len(), 20 * 5);
    }

    #[test]
    fn u_apex_voxel() {
        let spec = preset(PresetKind::Ushape, 90.0).unwrap().phantom;
        let p = spec.rasterize().unwrap();
        let Shape::UShape { center_x, base_y, radius, leg } = spec.fibers[0].shape else { panic!() };
        let apex = Vec3::new(center_x, base_y + leg + radius, 0.0);
        let t = p.dt_field.metric_at(&apex, &crate::tensor_core::MetricScheme::Inverse, Default::default()).unwrap();
        // metric's cheapest direction is horizontal at the apex
        assert!(t.eig().vector(1).x.abs() > 0.999);
    }

    #[test]
    fn uncovered_fiber_is_an_error() {
        let grid = Grid::unit(&[10, 10]).unwrap();
        let f = FiberSpec::new(Shape::Line { start: [50.0, 50.0, 0.0], end: [60.0, 50.0, 0.0] });
        assert!(matches!(rasterize(&[f], &grid, DEFAULT_BACKGROUND), Err(Error::DegenerateCurve(_))));
    }

    #[test]
    fn signal_values() {
        let p = line_phantom();
        let scheme = AcquisitionScheme { b: 1500.0, s0: 1.0, gradients: vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]] };
        let s = simulate_signal(&p, &scheme, 2).unwrap();
        let on = s.voxel(p.grid().index([10, 6, 0]));
        assert!((on[0] - (-2.55f64).exp()).abs() < 1e-15);
        assert!((on[0] - 0.0781).abs() < 1e-4);
        let bg = s.voxel(0);
        assert!((bg[0] - (-1.05f64).exp()).abs() < 1e-15 && (bg[1] - bg[0]).abs() < 1e-15);
        let s4 = simulate_signal(&p, &scheme, 4).unwrap();
        assert!((s4.voxel(p.grid().index([10, 6, 0]))[0] - on[0]).abs() < 1e-15);
        let hi = simulate_signal(&p, &AcquisitionScheme { b: 3000.0, ..scheme }, 2).unwrap();
        assert!(hi.values.iter().zip(&s.values).all(|(h, l)| h < l));
    }

    #[test]
    fn rician_properties() {
        let grid = Grid::unit(&[100, 100]).unwrap();
        let zero = SignalVolume { grid, n_gradients: 10, values: vec![0.0; 100_000] };
        let noisy = add_rician(&zero, 0.25, 42).unwrap();
        let mean = noisy.values.iter().sum::<f64>() / noisy.values.len() as f64;
        let want = 0.25 * (std::f64::consts::PI / 2.0).sqrt();
        assert!((mean - want).abs() < 0.02 * want, "{mean} vs {want}");
        assert!(noisy.values.iter().all(|v| *v >= 0.0));
        assert_eq!(add_rician(&zero, 0.25, 42).unwrap(), noisy);
        assert_ne!(add_rician(&zero, 0.25, 43).unwrap(), noisy);
        assert_eq!(add_rician(&zero, 0.0, 42).unwrap(), zero);
    }

    #[test]
    fn noiseless_dti_round_trip() {
        let p = line_phantom();
        let scheme = planar_scheme(12, 1500.0, 1.0).unwrap();
        let fit = fit_dti(&simulate_signal(&p, &scheme, 2).unwrap(), &scheme).unwrap();
        for (a, b) in fit.data().iter().zip(p.dt_field.data()) {
            assert!(a.frobenius_distance(b) < 1e-12);
        }
    }

    #[test]
    fn crossing_voxel_is_planar_in_dti() {
        let grid = Grid::unit(&[21, 21]).unwrap();
        let fibers = [
            FiberSpec::new(Shape::Line { start: [1.0, 10.0, 0.0], end: [19.0, 10.0, 0.0] }),
            FiberSpec::new(Shape::Line { start: [10.0, 1.0, 0.0], end: [10.0, 19.0, 0.0] }),
        ];
        let p = rasterize(&fibers, &grid, DEFAULT_BACKGROUND).unwrap();
        let scheme = planar_scheme(16, 1500.0, 1.0).unwrap();
        let fit = fit_dti(&simulate_signal(&p, &scheme, 2).unwrap(), &scheme).unwrap();
        let e = fit.at([10, 10, 0]).eig();
        assert!((e.values[0] - e.values[1]).abs() < 1e-12 * e.values[0]);
        // while the quartic fit keeps both directions
        let f4 = fit_tensor4_field(&simulate_signal(&p, &scheme, 4).unwrap(), &scheme).unwrap();
        let maxima = crate::tensor4::odf_maxima(&f4.data()[grid.index([10, 10, 0])], 1.0);
        assert_eq!(maxima.len(), 2);
    }
}
