use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor_core::Vec3;

/// Initial shooting directions spread over the spherical cap of a cone with
/// unit height and base radius `sigma · radius`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeSeed {
    pub apex: [f64; 3],
    pub axis: [f64; 3],
    pub radius: f64,
    pub sigma: f64,
    pub count: usize,
}

impl ConeSeed {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return Err(Error::InvalidParameter(format!("cone sigma must lie in (0, 1), got {}", self.sigma)));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("cone radius must be positive, got {}", self.radius)));
        }
        if self.count == 0 {
            return Err(Error::InvalidParameter("cone needs at least one direction".into()));
        }
        if !(Vec3::from(self.axis).norm() > 0.0) {
            return Err(Error::InvalidParameter("cone axis must be nonzero".into()));
        }
        Ok(())
    }

    pub fn cap_angle(&self) -> f64 {
        (self.sigma * self.radius).atan()
    }
}

const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

/// Unit directions, axis first. `dim == 2` gives an in-plane fan with the
/// remaining rays alternating left/right of the axis out to the cap angle;
/// `dim == 3` places them on a Fibonacci spiral over the cap.
pub fn seed_cone(seed: &ConeSeed, dim: usize) -> Result<Vec<Vec3>> {
    seed.validate()?;
    let mut axis = Vec3::from(seed.axis);
    if dim == 2 {
        axis.z = 0.0;
    }
    let axis = axis
        .try_normalize(0.0)
        .ok_or_else(|| Error::InvalidParameter("cone axis has no in-plane component".into()))?;
    let alpha = seed.cap_angle();
    let n = seed.count;
    let mut out = Vec::with_capacity(n);
    out.push(axis);
    if n == 1 {
        return Ok(out);
    }
    if dim == 2 {
        let perp = Vec3::new(-axis.y, axis.x, 0.0);
        let m = (n - 1).div_ceil(2) as f64;
        for i in 1..n {
            let step = i.div_ceil(2) as f64;
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            let th = sign * alpha * step / m;
            let d = axis * th.cos() + perp * th.sin();
            out.push(d.normalize());
        }
        return Ok(out);
    }
    let helper = if axis.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let u = axis.cross(&helper).normalize();
    let w = axis.cross(&u);
    let cos_alpha = alpha.cos();
    for i in 1..n {
        let frac = i as f64 / (n - 1) as f64;
        let ct = 1.0 - frac * (1.0 - cos_alpha);
        let st = (1.0 - ct * ct).max(0.0).sqrt();
        let phi = i as f64 * GOLDEN_ANGLE;
        let d = axis * ct + (u * phi.cos() + w * phi.sin()) * st;
        out.push(d.normalize());
    }
    Ok(out)
}
