//! Euclidean picture of a radial graph: `γ = ln tan(ρ/2)`, the graph
//! `ρ̃ = e^γ` in `R^{n+1}`, its support function `ũ`, and an experimental
//! solver for the induced evolution of `ũ`.

mod run;
mod state;

pub use run::{compare_traces, dual_run, profile_from_support, support_from_profile, DualOutcome, TraceComparison};
pub use state::{
    decomposition_residual, g_operator, gamma_transform, spherical_radius, support_closure, tilde_radius, DualNode,
    DualState,
};
