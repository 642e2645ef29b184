//! Radial graphs over `S^n` inside `S^{n+1}`: discretization, per-node
//! geometry, integrals over the hypersurface, and a full-tensor `n = 2`
//! backend used as an independent check of the axisymmetric reduction.

mod full_s2;
mod geometry;
mod grid;
mod profile;

pub use full_s2::{geometry_full_s2, SphereGrid2D, TensorGeometry, TensorNode};
pub(crate) use geometry::pole_angular_hessian;
pub use geometry::{geometry, integrate, minkowski_residual, volume, GeometryState, NodeGeometry};
pub use grid::{central_differences, CosineSeries, PolarGrid, MIN_GRID_NODES};
pub use profile::{differentiate, Checkpoint, RadialProfile};
