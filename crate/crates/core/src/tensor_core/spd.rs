//! Symmetric positive-definite tensors in 2 or 3 dimensions.
//!
//! A 2-D tensor is stored in the upper-left block of a 3×3 matrix; the third
//! row and column are kept at zero so that sums, products and quadratic forms
//! with in-plane vectors (z = 0) need no special casing.

use nalgebra::{Matrix2, Matrix3, SymmetricEigen, Vector3};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

const SYMMETRY_TOL: f64 = 1e-12;

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::Dimension(dim))
    }
}

/// Number of unique entries of a symmetric `dim`×`dim` matrix.
pub fn unique_len(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

/// Index pairs of the unique entries, in storage order
/// (xx, xy, xz, yy, yz, zz) or (xx, xy, yy).
pub fn unique_pairs(dim: usize) -> &'static [(usize, usize)] {
    const P3: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
    const P2: [(usize, usize); 3] = [(0, 0), (0, 1), (1, 1)];
    if dim == 2 {
        &P2
    } else {
        &P3
    }
}

/// Spectral decomposition `T = R Λ Rᵀ` with eigenvalues sorted descending.
///
/// Only the first `dim` entries of `values` and columns of `vectors` are
/// meaningful; the rest are zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenDecomposition {
    pub dim: usize,
    pub values: Vec3,
    pub vectors: Mat3,
}

impl EigenDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.values.as_slice()[..self.dim]
    }

    pub fn max(&self) -> f64 {
        self.values[0]
    }

    pub fn min(&self) -> f64 {
        self.values[self.dim - 1]
    }

    pub fn vector(&self, k: usize) -> Vec3 {
        self.vectors.column(k).into_owned()
    }

    /// Principal eigenvector (largest eigenvalue).
    pub fn principal(&self) -> Vec3 {
        self.vector(0)
    }

    /// `Σ f(λₖ) rₖ rₖᵀ`
    pub fn compose(&self, f: impl Fn(f64) -> f64) -> Mat3 {
        let mut out = Mat3::zeros();
        for k in 0..self.dim {
            let r = self.vector(k);
            out += r * r.transpose() * f(self.values[k]);
        }
        symmetrize(&out)
    }
}

pub(crate) fn symmetrize(m: &Mat3) -> Mat3 {
    (m + m.transpose()) * 0.5
}

/// Eigen-decomposition of an arbitrary symmetric matrix (not necessarily
/// positive definite).
pub fn sym_eigen(dim: usize, m: &Mat3) -> EigenDecomposition {
    let (raw_values, raw_vectors) = if dim == 2 {
        let se = SymmetricEigen::new(Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]));
        let mut vals = Vec3::zeros();
        let mut vecs = Mat3::zeros();
        for k in 0..2 {
            vals[k] = se.eigenvalues[k];
            vecs[(0, k)] = se.eigenvectors[(0, k)];
            vecs[(1, k)] = se.eigenvectors[(1, k)];
        }
        (vals, vecs)
    } else {
        let se = SymmetricEigen::new(*m);
        (se.eigenvalues, se.eigenvectors)
    };

    let mut order = [0usize, 1, 2];
    order[..dim].sort_by(|&a, &b| raw_values[b].total_cmp(&raw_values[a]));

    let mut values = Vec3::zeros();
    let mut vectors = Mat3::zeros();
    for (dst, &src) in order[..dim].iter().enumerate() {
        values[dst] = raw_values[src];
        let mut col = raw_vectors.column(src).into_owned();
        col /= col.norm();
        // deterministic sign: largest-magnitude component positive
        let lead = (0..dim)
            .max_by(|&a, &b| col[a].abs().total_cmp(&col[b].abs()))
            .unwrap_or(0);
        if col[lead] < 0.0 {
            col = -col;
        }
        vectors.set_column(dst, &col);
    }
    EigenDecomposition { dim, values, vectors }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpdTensor {
    dim: usize,
    m: Mat3,
}

impl SpdTensor {
    /// Validating constructor: the matrix must be symmetric and positive
    /// definite. Entries outside the `dim` block are ignored.
    pub fn new(dim: usize, m: Mat3) -> Result<Self> {
        check_dim(dim)?;
        let m = mask(dim, &m);
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("tensor entries"));
        }
        let asym = (m - m.transpose()).abs().max();
        let scale = m.abs().max().max(f64::MIN_POSITIVE);
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric(asym));
        }
        let m = symmetrize(&m);
        let eig = sym_eigen(dim, &m);
        if eig.min() <= 0.0 {
            return Err(Error::NotPositiveDefinite(eig.min()));
        }
        Ok(Self { dim, m })
    }

    /// Build from the unique entries in storage order, see [`unique_pairs`].
    pub fn from_unique(dim: usize, entries: &[f64]) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != unique_len(dim) {
            return Err(Error::InvalidParameter(format!(
                "expected {} unique entries, got {}",
                unique_len(dim),
                entries.len()
            )));
        }
        let mut m = Mat3::zeros();
        for (&(i, j), &v) in unique_pairs(dim).iter().zip(entries) {
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        Self::new(dim, m)
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        let dim = values.len();
        check_dim(dim)?;
        let mut m = Mat3::zeros();
        for (k, &v) in values.iter().enumerate() {
            m[(k, k)] = v;
        }
        Self::new(dim, m)
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, 1.0)
    }

    /// `c·I`; `c` must be positive.
    pub fn scaled_identity(dim: usize, c: f64) -> Self {
        assert!(c > 0.0 && (dim == 2 || dim == 3));
        let mut m = Mat3::zeros();
        for k in 0..dim {
            m[(k, k)] = c;
        }
        Self { dim, m }
    }

    /// `R diag(values) Rᵀ` from an orthonormal frame and positive eigenvalues.
    pub fn from_eigen(dim: usize, values: &[f64], frame: &Mat3) -> Result<Self> {
        check_dim(dim)?;
        if values.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: values.len() });
        }
        if let Some(&bad) = values.iter().find(|&&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::NotPositiveDefinite(bad));
        }
        let mut m = Mat3::zeros();
        for (k, &v) in values.iter().enumerate() {
            let r = frame.column(k);
            m += r * r.transpose() * v;
        }
        Ok(Self { dim, m: mask(dim, &symmetrize(&m)) })
    }

    /// Caller guarantees symmetry and positive definiteness (convex
    /// combinations, spectral recompositions with positive eigenvalues).
    pub(crate) fn from_trusted(dim: usize, m: Mat3) -> Self {
        Self { dim, m: mask(dim, &symmetrize(&m)) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn unique(&self) -> Vec<f64> {
        unique_pairs(self.dim).iter().map(|&(i, j)| self.m[(i, j)]).collect()
    }

    pub fn eig(&self) -> EigenDecomposition {
        sym_eigen(self.dim, &self.m)
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    pub fn det(&self) -> f64 {
        if self.dim == 2 {
            self.m[(0, 0)] * self.m[(1, 1)] - self.m[(0, 1)] * self.m[(1, 0)]
        } else {
            self.m.determinant()
        }
    }

    /// Quadratic form `vᵀ T v`.
    pub fn quad(&self, v: &Vec3) -> f64 {
        v.dot(&(self.m * v))
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::InvalidParameter(format!("scale factor {c} must be positive")));
        }
        Ok(Self { dim: self.dim, m: self.m * c })
    }

    /// Real matrix power computed spectrally.
    pub fn powf(&self, p: f64) -> Self {
        let eig = self.eig();
        Self::from_trusted(self.dim, eig.compose(|l| l.powf(p)))
    }

    pub fn inverse(&self) -> Self {
        self.powf(-1.0)
    }

    /// Matrix logarithm (symmetric, not necessarily definite).
    pub fn log(&self) -> Mat3 {
        self.eig().compose(f64::ln)
    }

    /// Matrix exponential of a symmetric matrix; always SPD.
    pub fn exp_sym(dim: usize, s: &Mat3) -> Self {
        let eig = sym_eigen(dim, &symmetrize(s));
        Self::from_trusted(dim, eig.compose(f64::exp))
    }

    /// Convex combination `Σ wᵢ Tᵢ`; weights must be non-negative with a
    /// positive sum.
    pub fn weighted_mean<'a>(dim: usize, items: impl IntoIterator<Item = (f64, &'a SpdTensor)>) -> Self {
        let mut m = Mat3::zeros();
        let mut total = 0.0;
        for (w, t) in items {
            debug_assert!(w >= 0.0);
            m += t.m * w;
            total += w;
        }
        Self::from_trusted(dim, m / total)
    }

    pub fn frobenius_distance(&self, other: &SpdTensor) -> f64 {
        (self.m - other.m).norm()
    }
}

fn mask(dim: usize, m: &Mat3) -> Mat3 {
    let mut out = *m;
    if dim == 2 {
        for k in 0..3 {
            out[(2, k)] = 0.0;
            out[(k, 2)] = 0.0;
        }
    }
    out
}

/// Random rotation helper shared by tests.
#[cfg(test)]
pub(crate) fn rotation_from_angles(dim: usize, a: f64, b: f64, c: f64) -> Mat3 {
    use nalgebra::Rotation3;
    if dim == 2 {
        let (s, co) = a.sin_cos();
        Mat3::new(co, -s, 0.0, s, co, 0.0, 0.0, 0.0, 0.0)
    } else {
        *Rotation3::from_euler_angles(a, b, c).matrix()
    }
}
