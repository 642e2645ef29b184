//! Locally constrained curvature flows of convex hypersurfaces in the
//! sphere `S^{n+1}`, restricted to axisymmetric radial graphs.
//!
//! The numerical core is generic over [`Real`]; the aliases below fix the
//! scalar to `f64`, which every solver and report uses.

// `!(x > 0)` is used on purpose so that NaN fails every positivity check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dualflow;
pub mod error;
pub mod flow;
pub mod hypersurface;
pub mod measure;
pub mod quermass;
pub mod scalar;
pub mod symfunc;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar};

pub type Curvatures = symfunc::CurvatureVector<f64>;
pub type Profile = hypersurface::RadialProfile<f64>;
pub type Geometry = hypersurface::GeometryState<f64>;
pub type Quermass = quermass::QuermassVector<f64>;
pub type Dual = dualflow::DualState<f64>;
