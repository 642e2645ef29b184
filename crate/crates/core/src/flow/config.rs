use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypersurface::{PolarGrid, RadialProfile};

/// Time-step control shared by the primal and dual solvers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DtPolicy {
    /// Fraction of the explicit parabolic stability limit, in `(0, 1]`.
    pub cfl_factor: f64,
    pub dt_max: f64,
}

impl Default for DtPolicy {
    fn default() -> Self {
        Self {
            cfl_factor: 0.5,
            dt_max: 1e-2,
        }
    }
}

/// Slacks used when checking the a priori estimates along a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct MonitorTolerances {
    /// Relative drift allowed for the conserved quermassintegral.
    pub drift: f64,
    /// Absolute slack on the `ρ` and `u` barriers.
    pub barrier: f64,
    /// Per-step slack on the signs of `ΔA_l`, relative to `|A_l|`.
    pub sign: f64,
    /// Coefficient `c` of the extra `c·h²·dt·|A_l|` sign allowance for the
    /// quadrature error of a step.
    pub discretization: f64,
    /// `F` must stay within `[min F₀/κ, κ·max F₀]`.
    pub f_bound_factor: f64,
}

impl Default for MonitorTolerances {
    fn default() -> Self {
        Self {
            drift: 1e-4,
            barrier: 1e-8,
            sign: 1e-8,
            discretization: 1.0,
            f_bound_factor: 2.0,
        }
    }
}

/// Initial hypersurface of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum InitialShape {
    GeodesicSphere {
        r: f64,
    },
    /// `ρ = r0 + eps·cos(mode·θ)`.
    Perturbed {
        r0: f64,
        eps: f64,
        mode: u32,
    },
    /// Samples on a uniform grid including both poles.
    Custom {
        theta: Vec<f64>,
        rho: Vec<f64>,
    },
}

impl InitialShape {
    pub fn profile(&self, n: usize, nodes: usize) -> Result<RadialProfile<f64>> {
        match self {
            InitialShape::GeodesicSphere { r } => RadialProfile::sphere(n, nodes, *r),
            InitialShape::Perturbed { r0, eps, mode } => {
                let m = f64::from(*mode);
                RadialProfile::from_fn(PolarGrid::uniform(n, nodes)?, |t| r0 + eps * (m * t).cos())
            }
            InitialShape::Custom { theta, rho } => {
                if theta.len() != nodes {
                    return Err(Error::Config(format!(
                        "custom shape has {} samples but N = {nodes}",
                        theta.len()
                    )));
                }
                RadialProfile::new(PolarGrid::from_theta(n, theta)?, rho.clone())
            }
        }
    }
}

fn default_sample_interval() -> f64 {
    0.01
}

fn default_blowup() -> f64 {
    1e3
}

/// Parameters of one primal or dual run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct FlowConfig {
    pub n: usize,
    pub k: usize,
    /// Number of latitude nodes, poles included.
    #[serde(rename = "N")]
    pub nodes: usize,
    #[serde(default)]
    pub dt_policy: DtPolicy,
    pub t_max: f64,
    /// Run stops once `max |f|` falls below this.
    pub convergence_tol: f64,
    #[serde(default)]
    pub monitor_tolerances: MonitorTolerances,
    pub initial_shape: InitialShape,
    /// Spacing of trace records in time.
    #[serde(default = "default_sample_interval")]
    pub sample_interval: f64,
    /// Time between in-run checkpoints; none if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint_every: Option<f64>,
    /// Abort once `max |λ|` exceeds this.
    #[serde(default = "default_blowup")]
    pub blowup_threshold: f64,
}

impl FlowConfig {
    /// Configuration of the reference experiment: `n = 2`, `k = 1`,
    /// `ρ = 0.8 + 0.05 cos 2θ` on 256 nodes.
    pub fn standard() -> Self {
        Self {
            n: 2,
            k: 1,
            nodes: 256,
            dt_policy: DtPolicy::default(),
            t_max: 50.0,
            convergence_tol: 1e-6,
            monitor_tolerances: MonitorTolerances::default(),
            initial_shape: InitialShape::Perturbed {
                r0: 0.8,
                eps: 0.05,
                mode: 2,
            },
            sample_interval: default_sample_interval(),
            checkpoint_every: None,
            blowup_threshold: default_blowup(),
        }
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: Self = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n < 2 {
            return bad(format!("n = {} must be at least 2", self.n));
        }
        if self.k >= self.n {
            return bad(format!("k = {} must lie in [0, n-1 = {}]", self.k, self.n - 1));
        }
        if self.nodes < crate::hypersurface::MIN_GRID_NODES {
            return bad(format!("N = {} is below the minimum grid size", self.nodes));
        }
        let p = &self.dt_policy;
        if !(p.cfl_factor > 0.0 && p.cfl_factor <= 1.0) {
            return bad(format!("cflFactor = {} outside (0, 1]", p.cfl_factor));
        }
        if !(p.dt_max > 0.0) {
            return bad(format!("dtMax = {} must be positive", p.dt_max));
        }
        if !(self.t_max >= 0.0 && self.t_max.is_finite()) {
            return bad(format!("tMax = {} must be finite and non-negative", self.t_max));
        }
        if !(self.convergence_tol > 0.0) {
            return bad(format!("convergenceTol = {} must be positive", self.convergence_tol));
        }
        if !(self.sample_interval > 0.0) {
            return bad(format!("sampleInterval = {} must be positive", self.sample_interval));
        }
        if let Some(c) = self.checkpoint_every {
            if !(c > 0.0) {
                return bad(format!("checkpointEvery = {c} must be positive"));
            }
        }
        if !(self.blowup_threshold > 0.0) {
            return bad(format!("blowupThreshold = {} must be positive", self.blowup_threshold));
        }
        if !(self.monitor_tolerances.f_bound_factor >= 1.0) {
            return bad("fBoundFactor must be at least 1".into());
        }
        Ok(())
    }

    pub fn initial_profile(&self) -> Result<RadialProfile<f64>> {
        self.initial_shape.profile(self.n, self.nodes)
    }
}
