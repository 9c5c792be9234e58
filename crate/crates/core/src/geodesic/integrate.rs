use super::christoffel::{christoffel, ChristoffelSymbols};
use crate::error::{Error, Result};
use crate::tensor_core::{Mat3, MetricScheme, SpdTensor, Vec3};
use crate::tensor_field::{central_difference, interpolate, InterpolationMethod, TensorField};

/// A Riemannian metric defined on an axis-aligned region.
pub trait MetricField: Sync {
    fn dim(&self) -> usize;

    fn contains(&self, x: &Vec3) -> bool;

    fn metric(&self, x: &Vec3) -> Result<SpdTensor>;

    /// Step of the finite differences behind [`MetricField::metric_derivatives`].
    fn fd_step(&self) -> f64;

    fn metric_derivatives(&self, x: &Vec3) -> Result<[Mat3; 3]> {
        central_difference(self.dim(), x, self.fd_step(), |p| self.contains(p), |p| Ok(*self.metric(p)?.matrix()))
    }

    fn christoffel(&self, x: &Vec3) -> Result<ChristoffelSymbols> {
        if !self.contains(x) {
            return Err(out_of_bounds(x));
        }
        Ok(christoffel(&self.metric(x)?, &self.metric_derivatives(x)?))
    }

    /// Local fiber direction used by hybrid tracing; `None` where the medium
    /// has no preferred direction.
    fn fiber_direction(&self, _x: &Vec3) -> Result<Option<Vec3>> {
        Ok(None)
    }
}

pub(crate) fn out_of_bounds(x: &Vec3) -> Error {
    Error::OutOfBounds([x[0], x[1], x[2]])
}

/// Relative eigenvalue gap below which the diffusion tensor is treated as
/// having no principal direction.
const ISOTROPY_GAP: f64 = 1e-9;

/// Metric induced on a tensor field by a [`MetricScheme`].
#[derive(Clone, Copy, Debug)]
pub struct FieldMetric<'a> {
    pub field: &'a TensorField,
    pub scheme: MetricScheme,
    pub method: InterpolationMethod,
    pub fd_step: f64,
}

impl<'a> FieldMetric<'a> {
    pub fn new(field: &'a TensorField, scheme: MetricScheme, method: InterpolationMethod, fd_step: f64) -> Self {
        Self { field, scheme, method, fd_step }
    }
}

impl MetricField for FieldMetric<'_> {
    fn dim(&self) -> usize {
        self.field.dim()
    }

    fn contains(&self, x: &Vec3) -> bool {
        self.field.in_bounds(x)
    }

    fn metric(&self, x: &Vec3) -> Result<SpdTensor> {
        self.field.metric_at(x, &self.scheme, self.method)
    }

    fn fd_step(&self) -> f64 {
        self.fd_step
    }

    fn fiber_direction(&self, x: &Vec3) -> Result<Option<Vec3>> {
        let e = interpolate(self.field, x, self.method)?.eig();
        if e.values[0] - e.values[1] <= ISOTROPY_GAP * e.values[0] {
            return Ok(None);
        }
        Ok(Some(e.principal()))
    }
}

/// Conformally flat metric `g = (a + b·x) I` on a box, with `x` the first
/// coordinate. Geodesics of this metric are known in closed form, which makes
/// it a reference field for the integrator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConformalField {
    pub dim: usize,
    pub a: f64,
    pub b: f64,
    pub lower: Vec3,
    pub upper: Vec3,
    pub fd_step: f64,
}

impl ConformalField {
    pub fn factor(&self, x: &Vec3) -> f64 {
        self.a + self.b * x[0]
    }
}

impl MetricField for ConformalField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn contains(&self, x: &Vec3) -> bool {
        (0..self.dim).all(|k| x[k] >= self.lower[k] && x[k] <= self.upper[k])
    }

    fn metric(&self, x: &Vec3) -> Result<SpdTensor> {
        if !self.contains(x) {
            return Err(out_of_bounds(x));
        }
        let f = self.factor(x);
        if f <= 0.0 {
            return Err(Error::NotPositiveDefinite(f));
        }
        Ok(SpdTensor::scaled_identity(self.dim, f))
    }

    fn fd_step(&self) -> f64 {
        self.fd_step
    }
}

/// Right-hand side of the first-order geodesic system: `(ẋ, v̇) = (v, −Γ(x)[v, v])`.
pub fn geodesic_rhs(field: &dyn MetricField, x: &Vec3, v: &Vec3) -> Result<(Vec3, Vec3)> {
    let gamma = field.christoffel(x)?;
    Ok((*v, gamma.acceleration(v)))
}

/// One classical Runge-Kutta step of size `h`.
pub fn rk4_step(field: &dyn MetricField, x: &Vec3, v: &Vec3, h: f64) -> Result<(Vec3, Vec3)> {
    let (k1x, k1v) = geodesic_rhs(field, x, v)?;
    let (k2x, k2v) = geodesic_rhs(field, &(x + k1x * (h / 2.0)), &(v + k1v * (h / 2.0)))?;
    let (k3x, k3v) = geodesic_rhs(field, &(x + k2x * (h / 2.0)), &(v + k2v * (h / 2.0)))?;
    let (k4x, k4v) = geodesic_rhs(field, &(x + k3x * h), &(v + k3v * h))?;
    Ok((
        x + (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (h / 6.0),
        v + (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0),
    ))
}

/// `n` fixed RK4 steps without any renormalisation.
pub fn integrate_fixed(field: &dyn MetricField, x0: &Vec3, v0: &Vec3, h: f64, n: usize) -> Result<(Vec3, Vec3)> {
    let (mut x, mut v) = (*x0, *v0);
    for _ in 0..n {
        (x, v) = rk4_step(field, &x, &v, h)?;
    }
    Ok((x, v))
}
