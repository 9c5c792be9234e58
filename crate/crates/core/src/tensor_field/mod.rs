//! Regular-grid tensor fields.
//!
//! Voxel `(i, j, k)` sits at `origin + (i, j, k) ∘ spacing`. The field covers
//! the closed box spanned by the voxel centers; x is the fastest-varying index
//! in the flat data array.

mod derivative;
mod interp;

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor_core::{EigenDecomposition, Mat3, MetricScheme, SpdTensor, Vec3};

pub use derivative::{central_difference, metric_derivatives};
pub use interp::{interpolate, loge_geodesic, sq_geodesic, InterpolationMethod};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub dims: Vec<usize>,
    pub spacing: Vec<f64>,
    pub origin: Vec<f64>,
}

impl Grid {
    pub fn new(dims: &[usize], spacing: &[f64], origin: &[f64]) -> Result<Self> {
        let grid = Self {
            dim: dims.len(),
            dims: dims.to_vec(),
            spacing: spacing.to_vec(),
            origin: origin.to_vec(),
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Unit spacing, origin at zero.
    pub fn unit(dims: &[usize]) -> Result<Self> {
        let d = dims.len();
        Self::new(dims, &vec![1.0; d], &vec![0.0; d])
    }

    pub fn validate(&self) -> Result<()> {
        crate::tensor_core::spd::check_dim(self.dim)?;
        if self.dims.len() != self.dim || self.spacing.len() != self.dim || self.origin.len() != self.dim {
            return Err(Error::InvalidParameter(format!(
                "grid arrays must all have length {}",
                self.dim
            )));
        }
        if self.dims.iter().any(|&n| n < 2) {
            return Err(Error::InvalidParameter(format!(
                "every grid axis needs at least 2 voxels, got {:?}",
                self.dims
            )));
        }
        if self.spacing.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "spacing must be positive, got {:?}",
                self.spacing
            )));
        }
        if self.origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::NonFinite("grid origin"));
        }
        Ok(())
    }

    pub fn n_voxels(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn index(&self, ijk: [usize; 3]) -> usize {
        let mut idx = 0;
        for a in (0..self.dim).rev() {
            idx = idx * self.dims[a] + ijk[a];
        }
        idx
    }

    pub fn voxel(&self, mut index: usize) -> [usize; 3] {
        let mut ijk = [0; 3];
        for a in 0..self.dim {
            ijk[a] = index % self.dims[a];
            index /= self.dims[a];
        }
        ijk
    }

    pub fn center(&self, ijk: [usize; 3]) -> Vec3 {
        let mut p = Vec3::zeros();
        for a in 0..self.dim {
            p[a] = self.origin[a] + ijk[a] as f64 * self.spacing[a];
        }
        p
    }

    pub fn lower(&self) -> Vec3 {
        self.center([0; 3])
    }

    pub fn upper(&self) -> Vec3 {
        let mut last = [0; 3];
        for a in 0..self.dim {
            last[a] = self.dims[a] - 1;
        }
        self.center(last)
    }

    /// Closed-box membership test.
    pub fn contains(&self, p: &Vec3) -> bool {
        let (lo, hi) = (self.lower(), self.upper());
        (0..self.dim).all(|a| p[a] >= lo[a] && p[a] <= hi[a])
    }

    /// Cell base index and fractional offsets in `[0, 1]` per axis.
    pub fn locate(&self, p: &Vec3) -> Option<([usize; 3], [f64; 3])> {
        if !self.contains(p) {
            return None;
        }
        let mut base = [0; 3];
        let mut frac = [0.0; 3];
        for a in 0..self.dim {
            let u = (p[a] - self.origin[a]) / self.spacing[a];
            let i = (u.floor().max(0.0) as usize).min(self.dims[a] - 2);
            base[a] = i;
            frac[a] = (u - i as f64).clamp(0.0, 1.0);
        }
        Some((base, frac))
    }
}

/// Regular grid of SPD tensors.
#[derive(Debug)]
pub struct TensorField {
    grid: Grid,
    data: Vec<SpdTensor>,
    logs: OnceLock<Vec<Mat3>>,
    eigs: OnceLock<Vec<EigenDecomposition>>,
}

impl Clone for TensorField {
    fn clone(&self) -> Self {
        Self::from_parts(self.grid.clone(), self.data.clone())
    }
}

impl PartialEq for TensorField {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.data == other.data
    }
}

impl TensorField {
    pub fn new(grid: Grid, data: Vec<SpdTensor>) -> Result<Self> {
        grid.validate()?;
        if data.len() != grid.n_voxels() {
            return Err(Error::InvalidParameter(format!(
                "field has {} tensors for {} voxels",
                data.len(),
                grid.n_voxels()
            )));
        }
        if let Some(t) = data.iter().find(|t| t.dim() != grid.dim) {
            return Err(Error::DimensionMismatch { expected: grid.dim, got: t.dim() });
        }
        Ok(Self::from_parts(grid, data))
    }

    fn from_parts(grid: Grid, data: Vec<SpdTensor>) -> Self {
        Self { grid, data, logs: OnceLock::new(), eigs: OnceLock::new() }
    }

    pub fn constant(grid: Grid, t: SpdTensor) -> Result<Self> {
        let n = grid.n_voxels();
        Self::new(grid, vec![t; n])
    }

    /// Sample `f` at every voxel center.
    pub fn from_fn(grid: Grid, f: impl Fn(&Vec3) -> SpdTensor) -> Result<Self> {
        let data = (0..grid.n_voxels()).map(|i| f(&grid.center(grid.voxel(i)))).collect();
        Self::new(grid, data)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim
    }

    pub fn data(&self) -> &[SpdTensor] {
        &self.data
    }

    pub fn at(&self, ijk: [usize; 3]) -> &SpdTensor {
        &self.data[self.grid.index(ijk)]
    }

    pub fn in_bounds(&self, p: &Vec3) -> bool {
        self.grid.contains(p)
    }

    pub(crate) fn logs(&self) -> &[Mat3] {
        self.logs.get_or_init(|| self.data.iter().map(SpdTensor::log).collect())
    }

    pub(crate) fn eigs(&self) -> &[EigenDecomposition] {
        self.eigs.get_or_init(|| self.data.iter().map(SpdTensor::eig).collect())
    }

    /// Metric field `g(x) = metric_from_tensor(interpolate(x))`.
    pub fn metric_at(&self, p: &Vec3, scheme: &MetricScheme, method: InterpolationMethod) -> Result<SpdTensor> {
        let d = interpolate(self, p, method)?;
        Ok(crate::tensor_core::metric_from_tensor(&d, scheme))
    }
}

pub fn in_bounds(field: &TensorField, p: &Vec3) -> bool {
    field.in_bounds(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_are_closed() {
        let g = Grid::new(&[4, 3], &[2.0, 0.5], &[1.0, -1.0]).unwrap();
        assert!(g.contains(&Vec3::new(1.0, -1.0, 0.0)));
        assert!(!g.contains(&Vec3::new(1.0 - 1e-9, -1.0, 0.0)));
        assert!(g.contains(&g.upper()));
        assert_eq!(g.upper(), Vec3::new(7.0, 0.0, 0.0));
        assert!(!g.contains(&Vec3::new(7.0 + 1e-9, 0.0, 0.0)));
    }

    #[test]
    fn index_round_trip() {
        let g = Grid::unit(&[3, 4, 5]).unwrap();
        for i in 0..g.n_voxels() {
            assert_eq!(g.index(g.voxel(i)), i);
        }
        assert_eq!(g.index([1, 0, 0]), 1);
        assert_eq!(g.index([0, 1, 0]), 3);
        assert_eq!(g.index([0, 0, 1]), 12);
    }

    #[test]
    fn locate_clamps_far_corner() {
        let g = Grid::unit(&[3, 3]).unwrap();
        let (base, frac) = g.locate(&Vec3::new(2.0, 0.5, 0.0)).unwrap();
        assert_eq!(&base[..2], &[1, 0]);
        assert_eq!(&frac[..2], &[1.0, 0.5]);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(&[1, 4], &[1.0, 1.0], &[0.0, 0.0]).is_err());
        assert!(Grid::new(&[4, 4], &[0.0, 1.0], &[0.0, 0.0]).is_err());
        assert!(Grid::new(&[4, 4], &[1.0], &[0.0, 0.0]).is_err());
        let g = Grid::unit(&[2, 2]).unwrap();
        assert!(TensorField::new(g.clone(), vec![SpdTensor::identity(2); 3]).is_err());
        assert!(TensorField::new(g, vec![SpdTensor::identity(3); 4]).is_err());
    }
}
