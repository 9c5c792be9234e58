//! Totally symmetric fourth-order diffusion tensors.
//!
//! Only the unique coefficients are stored, one per index multiset, in
//! lexicographic order of the sorted index string:
//!
//! * 3-D: `xxxx xxxy xxxz xxyy xxyz xxzz xyyy xyyz xyzz xzzz yyyy yyyz yyzz yzzz zzzz`
//! * 2-D: `xxxx xxxy xxyy xyyy yyyy`
//!
//! The diffusivity profile is `D(g) = Σ_{ijkl} D_ijkl g_i g_j g_k g_l`, where
//! each stored coefficient appears with its multinomial multiplicity.

mod crossing;
mod odf;

use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::io::{envelope_files, read_envelope, Encoding, Envelope, FileSet};
use crate::lsq::LeastSquares;
use crate::phantom::AcquisitionScheme;
use crate::tensor_core::spd::check_dim;
use crate::tensor_core::{sym_eigen, Mat3, SpdTensor, Vec3};
use crate::tensor_field::{Grid, TensorField};

pub use crossing::{track_crossing, CrossingLayer, LayerTracks};
pub use odf::odf_maxima;

const EXP3: [[u8; 3]; 15] = [
    [4, 0, 0],
    [3, 1, 0],
    [3, 0, 1],
    [2, 2, 0],
    [2, 1, 1],
    [2, 0, 2],
    [1, 3, 0],
    [1, 2, 1],
    [1, 1, 2],
    [1, 0, 3],
    [0, 4, 0],
    [0, 3, 1],
    [0, 2, 2],
    [0, 1, 3],
    [0, 0, 4],
];
const EXP2: [[u8; 3]; 5] = [[4, 0, 0], [3, 1, 0], [2, 2, 0], [1, 3, 0], [0, 4, 0]];

/// Exponents `(a, b, c)` of `x^a y^b z^c` for each stored coefficient.
pub fn monomials(dim: usize) -> &'static [[u8; 3]] {
    if dim == 2 {
        &EXP2
    } else {
        &EXP3
    }
}

pub fn n_coeffs(dim: usize) -> usize {
    monomials(dim).len()
}

/// `4! / (a! b! c!)`
pub fn multiplicity(e: &[u8; 3]) -> f64 {
    let fact = |n: u8| (1..=n as u32).product::<u32>() as f64;
    24.0 / (fact(e[0]) * fact(e[1]) * fact(e[2]))
}

fn monomial(e: &[u8; 3], g: &Vec3) -> f64 {
    g.x.powi(e[0] as i32) * g.y.powi(e[1] as i32) * g.z.powi(e[2] as i32)
}

fn slot_of(idx: [usize; 4], dim: usize) -> usize {
    let mut e = [0u8; 3];
    for i in idx {
        e[i] += 1;
    }
    monomials(dim).iter().position(|m| *m == e).expect("index outside dim")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tensor4 {
    dim: usize,
    coeffs: [f64; 15],
}

impl Tensor4 {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { dim, coeffs: [0.0; 15] })
    }

    pub fn from_coeffs(dim: usize, c: &[f64]) -> Result<Self> {
        check_dim(dim)?;
        if c.len() != n_coeffs(dim) {
            return Err(Error::InvalidParameter(format!(
                "{dim}-D fourth-order tensor has {} coefficients, got {}",
                n_coeffs(dim),
                c.len()
            )));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("tensor coefficients"));
        }
        let mut coeffs = [0.0; 15];
        coeffs[..c.len()].copy_from_slice(c);
        Ok(Self { dim, coeffs })
    }

    /// Symmetrisation of an arbitrary 4-index function.
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize, usize, usize) -> f64) -> Result<Self> {
        check_dim(dim)?;
        let mut sums = [0.0; 15];
        let mut counts = [0.0; 15];
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        let s = slot_of([i, j, k, l], dim);
                        sums[s] += f(i, j, k, l);
                        counts[s] += 1.0;
                    }
                }
            }
        }
        let c: Vec<f64> = (0..n_coeffs(dim)).map(|s| sums[s] / counts[s]).collect();
        Self::from_coeffs(dim, &c)
    }

    /// `v ⊗ v ⊗ v ⊗ v`
    pub fn outer(dim: usize, v: &Vec3) -> Result<Self> {
        let c: Vec<f64> = monomials(dim).iter().map(|e| monomial(e, v)).collect();
        Self::from_coeffs(dim, &c)
    }

    /// Symmetrised `A ⊗ B`, so that `D(g) = (gᵀAg)(gᵀBg)`.
    pub fn sym_product(a: &SpdTensor, b: &SpdTensor) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
        }
        let dim = a.dim();
        let (a, b) = (a.matrix(), b.matrix());
        Self::from_fn(dim, |i, j, k, l| {
            (a[(i, j)] * b[(k, l)] + a[(i, k)] * b[(j, l)] + a[(i, l)] * b[(j, k)]
                + b[(i, j)] * a[(k, l)] + b[(i, k)] * a[(j, l)] + b[(i, l)] * a[(j, k)])
                / 6.0
        })
    }

    /// `λ · sym(I ⊗ I)`, with `D(g) = λ` on unit vectors.
    pub fn isotropic(dim: usize, lambda: f64) -> Result<Self> {
        Self::sym_product(&SpdTensor::identity(dim), &SpdTensor::scaled_identity(dim, lambda))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs[..n_coeffs(self.dim)]
    }

    pub fn component(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.coeffs[slot_of([i, j, k, l], self.dim)]
    }

    pub fn d_of_g(&self, g: &Vec3) -> f64 {
        monomials(self.dim)
            .iter()
            .zip(&self.coeffs)
            .map(|(e, c)| multiplicity(e) * c * monomial(e, g))
            .sum()
    }

    pub fn add(&self, other: &Tensor4) -> Result<Tensor4> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let mut out = *self;
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> Tensor4 {
        let mut out = *self;
        out.coeffs.iter_mut().for_each(|c| *c *= s);
        out
    }

    /// `T'_ijkl = R_ia R_jb R_kc R_ld T_abcd`, by direct summation.
    pub fn rotated(&self, r: &Mat3) -> Tensor4 {
        let d = self.dim;
        Self::from_fn(d, |i, j, k, l| {
            let mut s = 0.0;
            for a in 0..d {
                for b in 0..d {
                    for c in 0..d {
                        for e in 0..d {
                            s += r[(i, a)] * r[(j, b)] * r[(k, c)] * r[(l, e)] * self.component(a, b, c, e);
                        }
                    }
                }
            }
            s
        })
        .expect("dimension already validated")
    }

    /// Second-order block `(a, b)` of the flattened tensor: entry `(c, d)` is
    /// `T_abcd`.
    pub fn block(&self, a: usize, b: usize) -> Mat3 {
        let mut m = Mat3::zeros();
        for c in 0..self.dim {
            for d in 0..self.dim {
                m[(c, d)] = self.component(a, b, c, d);
            }
        }
        m
    }

    /// `dim²×dim²` block matrix; block `(a, b)` sits at rows `a·dim..`,
    /// columns `b·dim..`.
    pub fn flatten(&self) -> FlattenedTensor4 {
        let d = self.dim;
        let mut m = DMatrix::zeros(d * d, d * d);
        for a in 0..d {
            for b in 0..d {
                let blk = self.block(a, b);
                for c in 0..d {
                    for e in 0..d {
                        m[(a * d + c, b * d + e)] = blk[(c, e)];
                    }
                }
            }
        }
        FlattenedTensor4 { dim: d, matrix: m }
    }

    /// The diagonal blocks `T_aa`, as SPD tensors.
    pub fn diagonal_components(&self) -> Result<Vec<SpdTensor>> {
        (0..self.dim).map(|a| psd_to_spd(self.dim, &self.block(a, a), a)).collect()
    }

    /// `Σ_a T_aa`
    pub fn diagonal_sum(&self) -> Result<SpdTensor> {
        let mut m = Mat3::zeros();
        for a in 0..self.dim {
            m += self.block(a, a);
        }
        psd_to_spd(self.dim, &m, self.dim)
    }
}

const PSD_CLAMP: f64 = 1e-12;
const PSD_TOLERANCE: f64 = 1e-6;

fn psd_to_spd(dim: usize, m: &Mat3, block: usize) -> Result<SpdTensor> {
    let e = sym_eigen(dim, m);
    let trace: f64 = e.eigenvalues().iter().sum();
    let min = e.min();
    if min < -PSD_TOLERANCE * trace.abs() || trace <= 0.0 && min < 0.0 {
        return Err(Error::NotPsd { block, eigenvalue: min });
    }
    let vals: Vec<f64> = e.eigenvalues().iter().map(|l| l.max(PSD_CLAMP)).collect();
    SpdTensor::from_eigen(dim, &vals, &e.vectors)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlattenedTensor4 {
    pub dim: usize,
    pub matrix: DMatrix<f64>,
}

impl FlattenedTensor4 {
    pub fn block(&self, a: usize, b: usize) -> Mat3 {
        let d = self.dim;
        let mut m = Mat3::zeros();
        for c in 0..d {
            for e in 0..d {
                m[(c, e)] = self.matrix[(a * d + c, b * d + e)];
            }
        }
        m
    }

    /// Read the unique coefficients back out of the blocks.
    pub fn to_tensor(&self) -> Result<Tensor4> {
        let d = self.dim;
        let c: Vec<f64> = monomials(d)
            .iter()
            .map(|e| {
                let mut idx = Vec::with_capacity(4);
                for (axis, &n) in e.iter().enumerate() {
                    idx.extend(std::iter::repeat_n(axis, n as usize));
                }
                self.matrix[(idx[0] * d + idx[2], idx[1] * d + idx[3])]
            })
            .collect();
        Tensor4::from_coeffs(d, &c)
    }
}

/// Log-linear least-squares fit of a fourth-order tensor.
#[derive(Clone, Debug)]
pub struct Tensor4Fitter {
    dim: usize,
    b: f64,
    s0: f64,
    solver: LeastSquares,
}

impl Tensor4Fitter {
    pub fn new(scheme: &AcquisitionScheme, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        scheme.validate()?;
        let mons = monomials(dim);
        let design = DMatrix::from_fn(scheme.gradients.len(), mons.len(), |r, c| {
            multiplicity(&mons[c]) * monomial(&mons[c], &Vec3::from(scheme.gradients[r]))
        });
        Ok(Self { dim, b: scheme.b, s0: scheme.s0, solver: LeastSquares::new(design)? })
    }

    /// Fit against `s0` instead of the scheme's reference signal.
    pub fn fit_with_s0(&self, signals: &[f64], s0: f64) -> Result<Tensor4> {
        let y = log_attenuation(signals, s0, self.b)?;
        Tensor4::from_coeffs(self.dim, self.solver.solve(&y).as_slice())
    }

    pub fn fit(&self, signals: &[f64]) -> Result<Tensor4> {
        self.fit_with_s0(signals, self.s0)
    }
}

pub(crate) fn log_attenuation(signals: &[f64], s0: f64, b: f64) -> Result<Vec<f64>> {
    if !(s0 > 0.0) {
        return Err(Error::InvalidParameter(format!("S0 must be positive, got {s0}")));
    }
    let ls0 = s0.ln();
    signals
        .iter()
        .enumerate()
        .map(|(index, &s)| {
            if s > 0.0 && s.is_finite() {
                Ok((ls0 - s.ln()) / b)
            } else {
                Err(Error::NonPositiveSignal { index, value: s })
            }
        })
        .collect()
}

/// One-shot fit; see [`Tensor4Fitter`] for repeated fits on one scheme.
pub fn fit_tensor4(signals: &[f64], scheme: &AcquisitionScheme, s0: f64, dim: usize) -> Result<Tensor4> {
    if signals.len() != scheme.gradients.len() {
        return Err(Error::InvalidParameter(format!(
            "{} signals for {} gradients",
            signals.len(),
            scheme.gradients.len()
        )));
    }
    Tensor4Fitter::new(scheme, dim)?.fit_with_s0(signals, s0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor4Field {
    grid: Grid,
    data: Vec<Tensor4>,
}

impl Tensor4Field {
    pub fn new(grid: Grid, data: Vec<Tensor4>) -> Result<Self> {
        grid.validate()?;
        if data.len() != grid.n_voxels() {
            return Err(Error::InvalidParameter(format!(
                "field has {} tensors for {} voxels",
                data.len(),
                grid.n_voxels()
            )));
        }
        if let Some(t) = data.iter().find(|t| t.dim != grid.dim) {
            return Err(Error::DimensionMismatch { expected: grid.dim, got: t.dim });
        }
        Ok(Self { grid, data })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn data(&self) -> &[Tensor4] {
        &self.data
    }

    /// One second-order field per diagonal block.
    pub fn diagonal_fields(&self) -> Result<Vec<TensorField>> {
        let per_voxel = crate::par::map_range(self.data.len(), |i| self.data[i].diagonal_components())
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        (0..self.grid.dim)
            .map(|a| TensorField::new(self.grid.clone(), per_voxel.iter().map(|c| c[a]).collect()))
            .collect()
    }

    pub fn diagonal_sum_field(&self) -> Result<TensorField> {
        let data = crate::par::map_range(self.data.len(), |i| self.data[i].diagonal_sum())
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        TensorField::new(self.grid.clone(), data)
    }

    pub fn files(&self, path: &Path, encoding: Encoding) -> Result<FileSet> {
        let env = Envelope {
            dims: self.grid.dims.clone(),
            spacing: self.grid.spacing.clone(),
            origin: self.grid.origin.clone(),
            dim: self.grid.dim,
            order: Some(4),
            n_gradients: None,
            encoding,
            data: None,
            data_file: None,
        };
        let values: Vec<f64> = self.data.iter().flat_map(|t| t.coeffs().to_vec()).collect();
        envelope_files(path, env, &values)
    }

    pub fn write(&self, path: &Path, encoding: Encoding) -> Result<()> {
        crate::io::write_files(&self.files(path, encoding)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let (env, values) = read_envelope(path)?;
        if env.order != Some(4) {
            return Err(Error::Format(format!("expected an order-4 field, header says {:?}", env.order)));
        }
        let grid = env.grid()?;
        let k = n_coeffs(grid.dim);
        if values.len() != k * grid.n_voxels() {
            return Err(Error::Format(format!(
                "payload has {} values, header {:?} needs {}",
                values.len(),
                env.dims,
                k * grid.n_voxels()
            )));
        }
        let data = values.chunks_exact(k).map(|c| Tensor4::from_coeffs(grid.dim, c)).collect::<Result<_>>()?;
        Self::new(grid, data)
    }
}
