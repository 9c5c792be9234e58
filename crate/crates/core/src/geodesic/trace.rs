use serde::{Deserialize, Serialize};

use super::integrate::{rk4_step, FieldMetric, MetricField};
use super::seed::{seed_cone, ConeSeed};
use crate::error::{Error, Result};
use crate::tensor_core::{MetricScheme, Vec3};
use crate::tensor_field::{InterpolationMethod, TensorField};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrackingMode {
    /// Velocity evolves by the geodesic equation alone.
    Pure,
    /// After every step the velocity is replaced by the principal
    /// eigenvector of the local diffusion tensor.
    #[default]
    Hybrid,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackingParams {
    pub step_size: f64,
    pub max_steps: usize,
    pub mode: TrackingMode,
    pub scheme: MetricScheme,
    pub method: InterpolationMethod,
    /// Finite-difference step for the metric derivatives.
    pub fd_step: f64,
}

impl Default for TrackingParams {
    fn default() -> Self {
        Self {
            step_size: 0.1,
            max_steps: 10_000,
            mode: TrackingMode::Hybrid,
            scheme: MetricScheme::default(),
            method: InterpolationMethod::Euclidean,
            fd_step: 0.1,
        }
    }
}

impl TrackingParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::InvalidParameter(format!("step_size must be positive, got {}", self.step_size)));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidParameter("max_steps must be positive".into()));
        }
        if !(self.fd_step > 0.0 && self.fd_step.is_finite()) {
            return Err(Error::InvalidParameter(format!("fd_step must be positive, got {}", self.fd_step)));
        }
        self.scheme.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    LeftGrid,
    MaxSteps,
    TargetHit,
    /// The integrator could not take an acceptable step even after
    /// repeated refinement (extremely stiff or singular metric).
    Degenerate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicTrack {
    pub vertices: Vec<Vec3>,
    pub directions: Vec<Vec3>,
    pub termination: Termination,
}

impl GeodesicTrack {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Euclidean arc length of the polyline.
    pub fn length(&self) -> f64 {
        self.vertices.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }
}

/// Axis-aligned box; only the first `dim` coordinates are tested.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Aabb {
    pub fn contains(&self, p: &Vec3, dim: usize) -> bool {
        (0..dim).all(|k| p[k] >= self.min[k] && p[k] <= self.max[k])
    }
}

const MAX_REFINE: u32 = 10;
const MAX_TURN_COS: f64 = 0.866;

enum StepFail {
    Left,
    Degenerate,
}

fn acceptable(x: &Vec3, x1: &Vec3, v1: &Vec3, v: &Vec3, h: f64) -> bool {
    let speed = v1.norm();
    x1.iter().all(|c| c.is_finite())
        && speed.is_finite()
        && (x1 - x).norm() <= 1.5 * h
        && (0.5..=2.0).contains(&speed)
        && v1.dot(v) >= MAX_TURN_COS * speed
}

/// Advance a unit-speed state by parameter `h`, halving the step where the
/// geodesic bends or accelerates sharply. The geodesic equation is invariant
/// under constant rescaling of the velocity, so renormalising between
/// sub-steps only reparametrises the curve.
fn advance(m: &dyn MetricField, x: &Vec3, v: &Vec3, h: f64, depth: u32) -> Result<(Vec3, Vec3), StepFail> {
    match rk4_step(m, x, v, h) {
        Ok((x1, v1)) if acceptable(x, &x1, &v1, v, h) => return Ok((x1, v1 / v1.norm())),
        Ok(_) => {}
        Err(Error::OutOfBounds(_)) if !m.contains(&(x + v * h)) => return Err(StepFail::Left),
        Err(Error::OutOfBounds(_)) => {}
        Err(_) => return Err(StepFail::Degenerate),
    }
    if depth >= MAX_REFINE {
        return Err(StepFail::Degenerate);
    }
    let (xm, vm) = advance(m, x, v, h / 2.0, depth + 1)?;
    advance(m, &xm, &vm, h / 2.0, depth + 1)
}

/// Trace one geodesic from `x0` along `v0` through an arbitrary metric.
pub fn trace_metric(
    m: &dyn MetricField,
    x0: &Vec3,
    v0: &Vec3,
    params: &TrackingParams,
    target: Option<&Aabb>,
) -> Result<GeodesicTrack> {
    params.validate()?;
    if !m.contains(x0) {
        return Err(Error::OutOfBounds([x0[0], x0[1], x0[2]]));
    }
    let dim = m.dim();
    let mut v = *v0;
    if dim == 2 {
        v.z = 0.0;
    }
    let mut v = v
        .try_normalize(0.0)
        .ok_or_else(|| Error::InvalidParameter("initial direction must be nonzero".into()))?;
    let mut x = *x0;
    let mut track = GeodesicTrack { vertices: vec![x], directions: vec![v], termination: Termination::MaxSteps };
    if target.is_some_and(|t| t.contains(&x, dim)) {
        track.termination = Termination::TargetHit;
        return Ok(track);
    }
    for _ in 0..params.max_steps {
        let (x1, v1) = match advance(m, &x, &v, params.step_size, 0) {
            Ok(s) => s,
            Err(StepFail::Left) => {
                track.termination = Termination::LeftGrid;
                return Ok(track);
            }
            Err(StepFail::Degenerate) => {
                track.termination = Termination::Degenerate;
                return Ok(track);
            }
        };
        let next = match params.mode {
            TrackingMode::Pure => v1,
            TrackingMode::Hybrid => match m.fiber_direction(&x1) {
                Ok(Some(e)) => {
                    if e.dot(&v) < 0.0 {
                        -e
                    } else {
                        e
                    }
                }
                Ok(None) => v1,
                Err(_) => {
                    track.termination = Termination::LeftGrid;
                    return Ok(track);
                }
            },
        };
        x = x1;
        v = next;
        track.vertices.push(x);
        track.directions.push(v);
        if target.is_some_and(|t| t.contains(&x, dim)) {
            track.termination = Termination::TargetHit;
            return Ok(track);
        }
    }
    Ok(track)
}

/// Trace through the metric that `params` induces on `field`.
pub fn trace(field: &TensorField, x0: &Vec3, v0: &Vec3, params: &TrackingParams) -> Result<GeodesicTrack> {
    let m = FieldMetric::new(field, params.scheme, params.method, params.fd_step);
    trace_metric(&m, x0, v0, params, None)
}

/// Shoot along `+v0` and `−v0` and join the halves into one polyline that
/// runs from the backward end, through `x0`, to the forward end.
pub fn trace_bidirectional(
    m: &dyn MetricField,
    x0: &Vec3,
    v0: &Vec3,
    params: &TrackingParams,
    target: Option<&Aabb>,
) -> Result<GeodesicTrack> {
    let fwd = trace_metric(m, x0, v0, params, target)?;
    let bwd = trace_metric(m, x0, &-v0, params, target)?;
    let mut vertices: Vec<Vec3> = bwd.vertices[1..].iter().rev().copied().collect();
    let mut directions: Vec<Vec3> = bwd.directions[1..].iter().rev().map(|d| -d).collect();
    vertices.extend(fwd.vertices);
    directions.extend(fwd.directions);
    let termination = if bwd.termination == Termination::TargetHit { bwd.termination } else { fwd.termination };
    Ok(GeodesicTrack { vertices, directions, termination })
}

/// Seed points sharing one shooting cone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedRegion {
    pub points: Vec<[f64; 3]>,
    pub axis: [f64; 3],
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default = "default_shots")]
    pub shots_per_point: usize,
    #[serde(default)]
    pub bidirectional: bool,
}

fn default_radius() -> f64 {
    1.0
}

fn default_sigma() -> f64 {
    0.2
}

fn default_shots() -> usize {
    5
}

impl From<&ConeSeed> for SeedRegion {
    fn from(c: &ConeSeed) -> Self {
        Self {
            points: vec![c.apex],
            axis: c.axis,
            radius: c.radius,
            sigma: c.sigma,
            shots_per_point: c.count,
            bidirectional: false,
        }
    }
}

impl SeedRegion {
    pub fn cone(&self, point: usize) -> ConeSeed {
        ConeSeed {
            apex: self.points[point],
            axis: self.axis,
            radius: self.radius,
            sigma: self.sigma,
            count: self.shots_per_point,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionResult {
    pub tracks: Vec<GeodesicTrack>,
    /// `(seed point index, shot index)` of every track.
    pub origins: Vec<(usize, usize)>,
    pub hits: Vec<bool>,
    pub hit_count: usize,
}

impl RegionResult {
    pub fn hit_fraction(&self) -> f64 {
        if self.tracks.is_empty() {
            0.0
        } else {
            self.hit_count as f64 / self.tracks.len() as f64
        }
    }
}

/// Launch every cone direction from every seed point and score the tracks
/// that reach `target`.
pub fn point_to_region(
    m: &dyn MetricField,
    seeds: &SeedRegion,
    target: &Aabb,
    params: &TrackingParams,
) -> Result<RegionResult> {
    params.validate()?;
    let outside: Vec<[f64; 3]> = seeds.points.iter().filter(|p| !m.contains(&Vec3::from(**p))).copied().collect();
    if !outside.is_empty() {
        return Err(Error::SeedsOutOfBounds(outside));
    }
    let dim = m.dim();
    let mut jobs = Vec::new();
    for p in 0..seeds.points.len() {
        for (s, d) in seed_cone(&seeds.cone(p), dim)?.into_iter().enumerate() {
            jobs.push((p, s, d));
        }
    }
    let tracks = crate::par::map_range(jobs.len(), |j| {
        let (p, _, d) = jobs[j];
        let x0 = Vec3::from(seeds.points[p]);
        if seeds.bidirectional {
            trace_bidirectional(m, &x0, &d, params, Some(target))
        } else {
            trace_metric(m, &x0, &d, params, Some(target))
        }
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let hits: Vec<bool> = tracks.iter().map(|t| t.vertices.iter().any(|v| target.contains(v, dim))).collect();
    Ok(RegionResult {
        hit_count: hits.iter().filter(|h| **h).count(),
        origins: jobs.iter().map(|&(p, s, _)| (p, s)).collect(),
        hits,
        tracks,
    })
}

/// [`point_to_region`] on the metric induced on a tensor field.
pub fn field_point_to_region(
    field: &TensorField,
    seeds: &SeedRegion,
    target: &Aabb,
    params: &TrackingParams,
) -> Result<RegionResult> {
    let m = FieldMetric::new(field, params.scheme, params.method, params.fd_step);
    point_to_region(&m, seeds, target, params)
}
