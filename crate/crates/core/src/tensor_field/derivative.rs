use super::{InterpolationMethod, TensorField};
use crate::error::{Error, Result};
use crate::tensor_core::{Mat3, MetricScheme, Vec3};

/// Per-axis finite differences of a matrix-valued function. Central where
/// both neighbours at `±h` lie inside `contains`, one-sided otherwise.
/// Slots beyond `dim` are zero.
pub fn central_difference(
    dim: usize,
    x: &Vec3,
    h: f64,
    contains: impl Fn(&Vec3) -> bool,
    f: impl Fn(&Vec3) -> Result<Mat3>,
) -> Result<[Mat3; 3]> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("difference step must be positive, got {h}")));
    }
    let mut out = [Mat3::zeros(); 3];
    let mut center = None;
    for (a, slot) in out.iter_mut().enumerate().take(dim) {
        let mut step = Vec3::zeros();
        step[a] = h;
        let (fwd, bwd) = (x + step, x - step);
        *slot = match (contains(&fwd), contains(&bwd)) {
            (true, true) => (f(&fwd)? - f(&bwd)?) / (2.0 * h),
            (true, false) => {
                let c = match center {
                    Some(c) => c,
                    None => *center.insert(f(x)?),
                };
                (f(&fwd)? - c) / h
            }
            (false, true) => {
                let c = match center {
                    Some(c) => c,
                    None => *center.insert(f(x)?),
                };
                (c - f(&bwd)?) / h
            }
            (false, false) => return Err(Error::OutOfBounds([x[0], x[1], x[2]])),
        };
    }
    Ok(out)
}

/// `∂g/∂x^α` of the metric field built from `field`.
pub fn metric_derivatives(
    field: &TensorField,
    pos: &Vec3,
    scheme: &MetricScheme,
    method: InterpolationMethod,
    h: f64,
) -> Result<[Mat3; 3]> {
    if !field.in_bounds(pos) {
        return Err(Error::OutOfBounds([pos[0], pos[1], pos[2]]));
    }
    central_difference(
        field.dim(),
        pos,
        h,
        |p| field.in_bounds(p),
        |p| Ok(*field.metric_at(p, scheme, method)?.matrix()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor_core::SpdTensor;
    use crate::tensor_field::Grid;

    #[test]
    fn constant_field_has_zero_derivatives() {
        let t = SpdTensor::diag(&[1.7e-3, 0.2e-3, 0.2e-3]).unwrap();
        let f = TensorField::constant(Grid::unit(&[4, 4, 4]).unwrap(), t).unwrap();
        for m in [InterpolationMethod::Euclidean, InterpolationMethod::LogEuclidean, InterpolationMethod::SpectralQuaternion] {
            for p in [Vec3::new(1.3, 2.2, 0.7), Vec3::new(0.0, 0.0, 0.0), Vec3::new(3.0, 1.5, 3.0)] {
                let dg = metric_derivatives(&f, &p, &MetricScheme::default(), m, 0.1).unwrap();
                let scale = f.metric_at(&p, &MetricScheme::default(), m).unwrap().matrix().norm();
                assert!(dg.iter().all(|d| d.norm() <= 1e-12 * scale), "{m:?} {p:?}");
            }
        }
    }

    #[test]
    fn linear_metric_entry() {
        let (a, b) = (2.0, 0.5);
        let grid = Grid::new(&[5, 3], &[0.5, 1.0], &[0.0, 0.0]).unwrap();
        let g11 = |x: f64| a + b * x;
        let d = central_difference(2, &Vec3::new(1.1, 0.4, 0.0), 0.1, |p| grid.contains(p), |p| {
            Ok(Mat3::from_diagonal(&Vec3::new(g11(p.x), 1.0, 0.0)))
        })
        .unwrap();
        assert!((d[0][(0, 0)] - b).abs() < 1e-8);
        assert!(d[1].norm() < 1e-15);

        // through the field: Euclidean interpolation of D linear in x, Inverse metric
        let field = TensorField::from_fn(grid, |p| SpdTensor::diag(&[g11(p.x), 1.0]).unwrap()).unwrap();
        for x in [0.05, 0.8, 1.3, 2.0] {
            let dg = metric_derivatives(&field, &Vec3::new(x, 1.0, 0.0), &MetricScheme::Adjugate, InterpolationMethod::Euclidean, 0.1)
                .unwrap();
            // adjugate of diag(u, 1) is diag(1, u): ∂/∂x of the (1,1) entry is b
            assert!((dg[0][(1, 1)] - b).abs() < 1e-8, "{x}: {}", dg[0][(1, 1)]);
            assert!(dg[0][(0, 0)].abs() < 1e-12);
        }
    }

    #[test]
    fn second_order_convergence() {
        // inside one cell, Euclidean interpolation of D = diag(1 + 0.8 x, 1)
        // is exact and the inverse metric is the rational 1 / (1 + 0.8 x)
        let grid = Grid::new(&[2, 2], &[2.0, 1.0], &[0.0, 0.0]).unwrap();
        let field = TensorField::from_fn(grid, |p| SpdTensor::diag(&[1.0 + 0.8 * p.x, 1.0]).unwrap()).unwrap();
        let x: f64 = 0.9;
        let exact = -0.8 / (1.0 + 0.8 * x).powi(2);
        let err = |h: f64| {
            let dg = metric_derivatives(&field, &Vec3::new(x, 0.5, 0.0), &MetricScheme::Inverse, InterpolationMethod::Euclidean, h)
                .unwrap();
            (dg[0][(0, 0)] - exact).abs()
        };
        let ratio = err(0.1) / err(0.05);
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    }

    #[test]
    fn one_sided_at_boundary_and_error_outside() {
        let grid = Grid::unit(&[3, 3]).unwrap();
        let field = TensorField::from_fn(grid, |p| SpdTensor::diag(&[1.0 + p.x, 1.0 + p.y]).unwrap()).unwrap();
        let dg = metric_derivatives(&field, &Vec3::new(0.0, 1.0, 0.0), &MetricScheme::Adjugate, InterpolationMethod::Euclidean, 0.1)
            .unwrap();
        assert!((dg[0][(1, 1)] - 1.0).abs() < 1e-12);
        assert!(metric_derivatives(&field, &Vec3::new(-0.5, 1.0, 0.0), &MetricScheme::Adjugate, InterpolationMethod::Euclidean, 0.1)
            .is_err());
        assert!(central_difference(2, &Vec3::new(0.5, 0.5, 0.0), 0.1, |_| false, |_| Ok(Mat3::zeros())).is_err());
    }
}
