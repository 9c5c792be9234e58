use nalgebra::{DMatrix, Rotation3, UnitQuaternion};
use serde::{Deserialize, Serialize};

use super::TensorField;
use crate::error::{Error, Result};
use crate::tensor_core::{EigenDecomposition, Mat3, SpdTensor, Vec3};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpolationMethod {
    #[default]
    Euclidean,
    LogEuclidean,
    SpectralQuaternion,
}

/// `exp(t·log T1 + (1 − t)·log T2)`: t = 1 gives `t1`, t = 0 gives `t2`.
pub fn loge_geodesic(t1: &SpdTensor, t2: &SpdTensor, t: f64) -> SpdTensor {
    let dim = t1.dim();
    SpdTensor::exp_sym(dim, &(t1.log() * t + t2.log() * (1.0 - t)))
}

/// Spectral-quaternion interpolation: rotations follow the SO(n) geodesic
/// between aligned eigenframes, eigenvalues interpolate geometrically.
/// t = 0 gives `t1`, t = 1 gives `t2`.
pub fn sq_geodesic(t1: &SpdTensor, t2: &SpdTensor, t: f64) -> SpdTensor {
    if t <= 0.0 {
        return *t1;
    }
    if t >= 1.0 {
        return *t2;
    }
    sq_from_eigs(&t1.eig(), &t2.eig(), t)
}

fn sq_from_eigs(e1: &EigenDecomposition, e2: &EigenDecomposition, t: f64) -> SpdTensor {
    let dim = e1.dim;
    let (r1, r2) = aligned_frames(e1, e2);
    let rel = r1.transpose() * r2;
    let rot_t = if dim == 3 {
        let mut q = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(rel));
        if q.w < 0.0 {
            q = UnitQuaternion::new_unchecked(-q.into_inner());
        }
        q.powf(t).to_rotation_matrix().into_inner()
    } else {
        let angle = rel[(1, 0)].atan2(rel[(0, 0)]) * t;
        let (s, c) = angle.sin_cos();
        Mat3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 0.0)
    };
    let frame = r1 * rot_t;
    let mut values = [0.0; 3];
    for k in 0..dim {
        values[k] = e1.values[k].powf(1.0 - t) * e2.values[k].powf(t);
    }
    let mut m = Mat3::zeros();
    for k in 0..dim {
        let r = frame.column(k);
        m += r * r.transpose() * values[k];
    }
    SpdTensor::from_trusted(dim, m)
}

const TIE_TOL: f64 = 1e-8;

fn tie_groups(e: &EigenDecomposition) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = vec![vec![0]];
    for k in 1..e.dim {
        if e.values[k - 1] - e.values[k] <= TIE_TOL * e.values[0].abs() {
            groups.last_mut().unwrap().push(k);
        } else {
            groups.push(vec![k]);
        }
    }
    groups
}

fn frame_det(dim: usize, r: &Mat3) -> f64 {
    if dim == 2 {
        r[(0, 0)] * r[(1, 1)] - r[(0, 1)] * r[(1, 0)]
    } else {
        r.determinant()
    }
}

/// Orthogonal change of basis inside one eigenspace, chosen to bring `src`
/// columns as close as possible to `target` columns (orthogonal Procrustes).
struct GroupFit {
    cols: Vec<usize>,
    u: DMatrix<f64>,
    vt: DMatrix<f64>,
    /// Trace lost if this group has to absorb a reflection.
    flip_cost: f64,
}

fn fit_group(src: &Mat3, target: &Mat3, cols: &[usize], dim: usize) -> GroupFit {
    let k = cols.len();
    let mut m = DMatrix::<f64>::zeros(k, k);
    for (a, &ca) in cols.iter().enumerate() {
        for (b, &cb) in cols.iter().enumerate() {
            m[(a, b)] = (0..dim).map(|r| src[(r, ca)] * target[(r, cb)]).sum();
        }
    }
    if k == 1 {
        let d = m[(0, 0)];
        let s = if d < 0.0 { -1.0 } else { 1.0 };
        return GroupFit {
            cols: cols.to_vec(),
            u: DMatrix::from_element(1, 1, s),
            vt: DMatrix::from_element(1, 1, 1.0),
            flip_cost: 2.0 * d.abs(),
        };
    }
    let svd = m.svd(true, true);
    let smallest = svd.singular_values.iter().copied().fold(f64::MAX, f64::min);
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    // nalgebra orders singular values descending; keep the reflection slot last
    let order: Vec<usize> = {
        let mut idx: Vec<usize> = (0..k).collect();
        idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        idx
    };
    let u = DMatrix::from_fn(k, k, |r, c| u[(r, order[c])]);
    let vt = DMatrix::from_fn(k, k, |r, c| vt[(order[r], c)]);
    GroupFit { cols: cols.to_vec(), u, vt, flip_cost: 2.0 * smallest }
}

fn apply_group(src: &Mat3, fit: &GroupFit, reflect: bool, dim: usize) -> Mat3 {
    let k = fit.cols.len();
    let mut s = DMatrix::identity(k, k);
    if reflect {
        s[(k - 1, k - 1)] = -1.0;
    }
    let q = &fit.u * s * &fit.vt;
    let mut out = *src;
    for (b, &cb) in fit.cols.iter().enumerate() {
        for r in 0..dim {
            out[(r, cb)] = fit.cols.iter().enumerate().map(|(a, &ca)| src[(r, ca)] * q[(a, b)]).sum();
        }
    }
    out
}

/// Re-express `src`'s eigenframe (same tensor) as the proper rotation with
/// maximal `trace(targetᵀ · frame)`.
fn align_to(src: &EigenDecomposition, frame: &Mat3, target: &Mat3) -> Mat3 {
    let dim = src.dim;
    let fits: Vec<GroupFit> = tie_groups(src).iter().map(|g| fit_group(frame, target, g, dim)).collect();
    let mut out = *frame;
    for f in &fits {
        out = apply_group(&out, f, false, dim);
    }
    if frame_det(dim, &out) < 0.0 {
        let cheapest = fits
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.flip_cost.total_cmp(&b.1.flip_cost))
            .map(|(i, _)| i)
            .unwrap_or(0);
        out = *frame;
        for (i, f) in fits.iter().enumerate() {
            out = apply_group(&out, f, i == cheapest, dim);
        }
    }
    out
}

fn proper(dim: usize, r: &Mat3) -> Mat3 {
    let mut r = *r;
    if frame_det(dim, &r) < 0.0 {
        let mut c = r.column_mut(dim - 1);
        c.neg_mut();
    }
    r
}

/// Eigenframes of both tensors as proper rotations, with the second frame
/// (and, inside degenerate eigenspaces, the first) chosen closest to the other.
fn aligned_frames(e1: &EigenDecomposition, e2: &EigenDecomposition) -> (Mat3, Mat3) {
    let dim = e1.dim;
    let mut r1 = proper(dim, &e1.vectors);
    let mut r2 = align_to(e2, &e2.vectors, &r1);
    if tie_groups(e1).iter().any(|g| g.len() > 1) {
        r1 = align_to(e1, &r1, &r2);
        r2 = align_to(e2, &r2, &r1);
    }
    (r1, r2)
}

fn corner_weights(dim: usize, frac: &[f64; 3]) -> Vec<f64> {
    (0..1usize << dim)
        .map(|c| (0..dim).map(|a| if c >> a & 1 == 1 { frac[a] } else { 1.0 - frac[a] }).product())
        .collect()
}

fn corner_indices(field: &TensorField, base: [usize; 3]) -> Vec<usize> {
    let dim = field.dim();
    (0..1usize << dim)
        .map(|c| {
            let mut ijk = base;
            for (a, v) in ijk.iter_mut().enumerate().take(dim) {
                *v += c >> a & 1;
            }
            field.grid().index(ijk)
        })
        .collect()
}

/// Multilinear interpolation of the field under the chosen geometry.
pub fn interpolate(field: &TensorField, pos: &Vec3, method: InterpolationMethod) -> Result<SpdTensor> {
    let dim = field.dim();
    let (base, frac) = field
        .grid()
        .locate(pos)
        .ok_or(Error::OutOfBounds([pos[0], pos[1], pos[2]]))?;
    let idx = corner_indices(field, base);
    let weights = corner_weights(dim, &frac);

    // exact node reproduction
    if let Some(c) = weights.iter().position(|&w| w == 1.0) {
        return Ok(field.data()[idx[c]]);
    }

    match method {
        InterpolationMethod::Euclidean => Ok(SpdTensor::weighted_mean(
            dim,
            weights.iter().zip(&idx).filter(|(w, _)| **w > 0.0).map(|(&w, &i)| (w, &field.data()[i])),
        )),
        InterpolationMethod::LogEuclidean => {
            let logs = field.logs();
            let mut acc = Mat3::zeros();
            for (&w, &i) in weights.iter().zip(&idx) {
                if w > 0.0 {
                    acc += logs[i] * w;
                }
            }
            Ok(SpdTensor::exp_sym(dim, &acc))
        }
        InterpolationMethod::SpectralQuaternion => {
            let eigs = field.eigs();
            let mut level: Vec<(SpdTensor, EigenDecomposition)> =
                idx.iter().map(|&i| (field.data()[i], eigs[i])).collect();
            for &t in frac.iter().take(dim) {
                level = level
                    .chunks(2)
                    .map(|pair| {
                        let (a, b) = (&pair[0], &pair[1]);
                        let out = if t <= 0.0 {
                            a.0
                        } else if t >= 1.0 {
                            b.0
                        } else {
                            sq_from_eigs(&a.1, &b.1, t)
                        };
                        (out, out.eig())
                    })
                    .collect();
            }
            Ok(level[0].0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor_core::hilbert_anisotropy;
    use crate::tensor_core::spd::rotation_from_angles;
    use crate::tensor_field::Grid;
    use proptest::prelude::*;
    use std::f64::consts::{E, FRAC_PI_2, FRAC_PI_4};

    fn rot_z(angle: f64) -> Mat3 {
        rotation_from_angles(3, 0.0, 0.0, angle)
    }

    #[test]
    fn loge_endpoints_and_commuting_case() {
        let t1 = SpdTensor::diag(&[E * E, 1.0, 1.0]).unwrap();
        let t2 = SpdTensor::identity(3);
        assert!(loge_geodesic(&t1, &t2, 1.0).frobenius_distance(&t1) < 1e-12);
        assert!(loge_geodesic(&t1, &t2, 0.0).frobenius_distance(&t2) < 1e-12);
        let mid = loge_geodesic(&t1, &t2, 0.5);
        let want = SpdTensor::diag(&[E, 1.0, 1.0]).unwrap();
        assert!(mid.frobenius_distance(&want) < 1e-12);
    }

    #[test]
    fn same_tensor_is_fixed() {
        let t = SpdTensor::from_eigen(3, &[3.0, 1.2, 0.4], &rotation_from_angles(3, 0.3, 0.2, 1.0)).unwrap();
        for s in [0.0, 0.3, 0.5, 1.0] {
            assert!(loge_geodesic(&t, &t, s).frobenius_distance(&t) < 1e-12);
            assert!(sq_geodesic(&t, &t, s).frobenius_distance(&t) < 1e-12);
        }
    }

    #[test]
    fn sq_rotates_principal_axis_halfway() {
        let t1 = SpdTensor::diag(&[3.0, 1.0, 1.0]).unwrap();
        let t2 = SpdTensor::from_eigen(3, &[3.0, 1.0, 1.0], &rot_z(FRAC_PI_2)).unwrap();
        let mid = sq_geodesic(&t1, &t2, 0.5);
        let e = mid.eig();
        for (got, want) in e.eigenvalues().iter().zip([3.0, 1.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let p = e.principal();
        assert!(p.z.abs() < 1e-12);
        assert!((p.x.abs().acos() - FRAC_PI_4).abs() < 1e-9);
        assert!((p.y.abs().acos() - FRAC_PI_4).abs() < 1e-9);
        assert!(sq_geodesic(&t1, &t2, 1.0).frobenius_distance(&t2) < 1e-12);
    }

    #[test]
    fn sq_in_plane_rotation() {
        let t1 = SpdTensor::diag(&[3.0, 1.0]).unwrap();
        let t2 = SpdTensor::from_eigen(2, &[3.0, 1.0], &rotation_from_angles(2, 1.2, 0.0, 0.0)).unwrap();
        let mid = sq_geodesic(&t1, &t2, 0.5);
        let p = mid.eig().principal();
        assert!((p.y.atan2(p.x).abs() - 0.6).abs() < 1e-12);
        assert!((hilbert_anisotropy(&mid) - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn loge_swells_sq_preserves() {
        let t1 = SpdTensor::diag(&[3.0, 1.0, 1.0]).unwrap();
        let t2 = SpdTensor::from_eigen(3, &[3.0, 1.0, 1.0], &rot_z(1.3)).unwrap();
        let ha = hilbert_anisotropy(&t1);
        let mut min_loge = f64::MAX;
        for i in 1..20 {
            let s = i as f64 / 20.0;
            let sq = sq_geodesic(&t1, &t2, s);
            assert!((hilbert_anisotropy(&sq) - ha).abs() < 1e-9);
            let le = loge_geodesic(&t1, &t2, s);
            assert!(hilbert_anisotropy(&le) < ha);
            min_loge = min_loge.min(hilbert_anisotropy(&le));
        }
        assert!(min_loge < ha - 0.1);
    }

    fn random_field(dim: usize, seed: u64) -> TensorField {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let dims = if dim == 2 { vec![4, 3] } else { vec![3, 3, 3] };
        let grid = Grid::new(&dims, &vec![1.5; dim], &vec![-1.0; dim]).unwrap();
        let data = (0..grid.n_voxels())
            .map(|_| {
                let r = rotation_from_angles(dim, rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
                let vals: Vec<f64> = (0..dim).map(|_| rng.random_range(0.05..3.0)).collect();
                SpdTensor::from_eigen(dim, &vals, &r).unwrap()
            })
            .collect();
        TensorField::new(grid, data).unwrap()
    }

    const METHODS: [InterpolationMethod; 3] = [
        InterpolationMethod::Euclidean,
        InterpolationMethod::LogEuclidean,
        InterpolationMethod::SpectralQuaternion,
    ];

    #[test]
    fn node_reproduction() {
        for dim in [2, 3] {
            let f = random_field(dim, 7);
            for i in 0..f.grid().n_voxels() {
                let p = f.grid().center(f.grid().voxel(i));
                for m in METHODS {
                    let t = interpolate(&f, &p, m).unwrap();
                    assert!(t.frobenius_distance(&f.data()[i]) <= 1e-12, "{m:?} voxel {i}");
                }
            }
        }
    }

    #[test]
    fn midpoint_of_equal_neighbours() {
        let t = SpdTensor::from_eigen(2, &[2.0, 0.5], &rotation_from_angles(2, 0.4, 0.0, 0.0)).unwrap();
        let f = TensorField::constant(Grid::unit(&[2, 2]).unwrap(), t).unwrap();
        for m in METHODS {
            let got = interpolate(&f, &Vec3::new(0.5, 0.5, 0.0), m).unwrap();
            assert!(got.frobenius_distance(&t) < 1e-12, "{m:?}");
        }
    }

    #[test]
    fn loge_midpoint_of_field() {
        let grid = Grid::unit(&[2, 2]).unwrap();
        let a = SpdTensor::diag(&[E * E, 1.0]).unwrap();
        let b = SpdTensor::identity(2);
        let f = TensorField::new(grid, vec![a, b, a, b]).unwrap();
        let mid = interpolate(&f, &Vec3::new(0.5, 0.3, 0.0), InterpolationMethod::LogEuclidean).unwrap();
        assert!(mid.frobenius_distance(&SpdTensor::diag(&[E, 1.0]).unwrap()) < 1e-12);
    }

    #[test]
    fn out_of_bounds_is_an_error() {
        let f = random_field(2, 1);
        assert!(matches!(
            interpolate(&f, &Vec3::new(-1.1, 0.0, 0.0), InterpolationMethod::Euclidean),
            Err(Error::OutOfBounds(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn interpolation_stays_spd(seed in 0u64..20, dim in 2usize..=3, u in 0.0f64..1.0, v in 0.0f64..1.0, w in 0.0f64..1.0) {
            let f = random_field(dim, seed);
            let lo = f.grid().lower();
            let hi = f.grid().upper();
            let p = Vec3::new(lo.x + u * (hi.x - lo.x), lo.y + v * (hi.y - lo.y), if dim == 3 { lo.z + w * (hi.z - lo.z) } else { 0.0 });
            for m in METHODS {
                let t = interpolate(&f, &p, m).unwrap();
                prop_assert!(SpdTensor::new(dim, *t.matrix()).is_ok());
            }
        }
    }
}
