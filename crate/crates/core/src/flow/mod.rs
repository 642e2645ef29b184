//! Time integration of `∂_tX = (c_{n,k}φ′(ρ) − u·σ_{k+1}/σ_k)ν` on
//! axisymmetric radial graphs, with monitors for the a priori estimates.

mod config;
mod monitor;
mod residual;
mod run;
mod solver;
mod trace;

pub use config::{DtPolicy, FlowConfig, InitialShape, MonitorTolerances};
pub use monitor::{Extremes, Monitor, Violation};
pub use residual::{evolution_residual_f, evolution_residual_u, quermass_rates, residual_f_nodal, QuermassRate};
pub(crate) use run::{convex_start, record, Clock};
pub use run::{run, FlowOutcome, Termination};
pub use solver::{advance, advance_state, diffusion_bound, radial_rate, speed, stable_dt, step, StepController};
pub use trace::{FlowRecord, FlowTrace};
