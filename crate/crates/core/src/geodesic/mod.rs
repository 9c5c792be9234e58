//! Geodesic ray tracing through a Riemannian metric field.
//!
//! Geodesics solve `ẍ^γ + Γ^γ_{αβ} ẋ^α ẋ^β = 0`. The connection coefficients
//! are evaluated locally from finite differences of the interpolated metric,
//! and the system is integrated with classical RK4 at unit Euclidean speed.

mod christoffel;
mod integrate;
mod seed;
mod trace;

pub use christoffel::{christoffel, ChristoffelSymbols};
pub use integrate::{geodesic_rhs, integrate_fixed, rk4_step, ConformalField, FieldMetric, MetricField};
pub use seed::{seed_cone, ConeSeed};
pub use trace::{
    field_point_to_region, point_to_region, trace, trace_bidirectional, trace_metric, Aabb, GeodesicTrack,
    RegionResult, SeedRegion, Termination, TrackingMode, TrackingParams,
};
