//! Geodesic ray-tracing tractography on diffusion tensor fields.
//!
//! Fibers are modelled as geodesics of a Riemannian metric derived from the
//! diffusion tensor. The crate covers the metric construction
//! ([`tensor_core`]), regular-grid tensor fields and their interpolation
//! ([`tensor_field`]), the geodesic integrator and trackers ([`geodesic`]),
//! fourth-order tensors and crossing resolution ([`tensor4`]) and synthetic
//! phantoms ([`phantom`]).

pub mod error;
pub mod experiments;
pub mod geodesic;
pub mod io;
pub mod phantom;
pub mod svg;
pub mod tensor4;
pub mod tensor_core;
pub mod tensor_field;

mod lsq;
mod par;

pub use error::{Error, Result};
pub use tensor_core::{Mat3, SpdTensor, Vec3};
