use std::fmt;

use serde::Serialize;

use super::config::MonitorTolerances;
use super::solver::speed;
use crate::hypersurface::GeometryState;
use crate::quermass::QuermassVector;

/// A breached a priori estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Violation {
    /// The conserved `A_{k−1}` drifted beyond tolerance.
    Drift,
    /// `ΔA_l` has the wrong sign for index `l`.
    Monotonicity {
        l: isize,
    },
    RhoBelowInitial,
    RhoAboveInitial,
    SupportBelowInitial,
    CurvatureQuotientLow,
    CurvatureQuotientHigh,
    /// `λ_min ≤ 0`; terminates the run.
    ConvexityLoss,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Drift => f.write_str("drift"),
            Violation::Monotonicity { l } => write!(f, "sign{l}"),
            Violation::RhoBelowInitial => f.write_str("rhoMin"),
            Violation::RhoAboveInitial => f.write_str("rhoMax"),
            Violation::SupportBelowInitial => f.write_str("uMin"),
            Violation::CurvatureQuotientLow => f.write_str("fLow"),
            Violation::CurvatureQuotientHigh => f.write_str("fHigh"),
            Violation::ConvexityLoss => f.write_str("convexity"),
        }
    }
}

/// Nodal extremes of one state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Extremes {
    pub min_u: f64,
    pub min_rho: f64,
    pub max_rho: f64,
    /// Extremes of the curvature quotient `F = σ_{k+1}/σ_k`.
    pub min_f: f64,
    pub max_f: f64,
    pub min_lambda: f64,
    pub max_lambda: f64,
    /// `max |f|` for the normal speed `f`.
    pub max_speed: f64,
}

impl Extremes {
    pub fn of(state: &GeometryState<f64>) -> Self {
        let nodes = state.nodes();
        let fold_min = |f: &dyn Fn(usize) -> f64| (0..nodes.len()).map(f).fold(f64::INFINITY, f64::min);
        let fold_max = |f: &dyn Fn(usize) -> f64| (0..nodes.len()).map(f).fold(f64::NEG_INFINITY, f64::max);
        Self {
            min_u: fold_min(&|j| nodes[j].u),
            min_rho: fold_min(&|j| nodes[j].rho),
            max_rho: fold_max(&|j| nodes[j].rho),
            min_f: fold_min(&|j| nodes[j].quotient.f),
            max_f: fold_max(&|j| nodes[j].quotient.f),
            min_lambda: state.min_lambda(),
            max_lambda: state.max_lambda(),
            max_speed: speed(state).iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }
}

/// Tracks the estimates of a run against its initial state.
#[derive(Clone, Debug)]
pub struct Monitor {
    k: usize,
    tol: MonitorTolerances,
    initial: Extremes,
    conserved0: f64,
    previous: QuermassVector<f64>,
}

impl Monitor {
    pub fn new(state: &GeometryState<f64>, q: &QuermassVector<f64>, tol: MonitorTolerances) -> Self {
        let k = state.k();
        Self {
            k,
            tol,
            initial: Extremes::of(state),
            conserved0: q.get(k as isize - 1).expect("index in range"),
            previous: q.clone(),
        }
    }

    pub fn initial(&self) -> &Extremes {
        &self.initial
    }

    /// Relative change of `A_{k−1}` since the start.
    pub fn drift(&self, q: &QuermassVector<f64>) -> f64 {
        let now = q.get(self.k as isize - 1).expect("index in range");
        (now - self.conserved0).abs() / self.conserved0.abs()
    }

    /// Checks one accepted step of size `dt` and returns the breached estimates.
    pub fn observe(
        &mut self,
        state: &GeometryState<f64>,
        q: &QuermassVector<f64>,
        dt: f64,
    ) -> (Extremes, Vec<Violation>) {
        let ex = Extremes::of(state);
        let mut out = Vec::new();
        if self.drift(q) > self.tol.drift {
            out.push(Violation::Drift);
        }
        let conserved = self.k as isize - 1;
        let h = state.grid().spacing();
        let relative = self.tol.sign + self.tol.discretization * h * h * dt;
        for l in -1..=q.n() as isize {
            if l == conserved {
                continue;
            }
            let before = self.previous.get(l).expect("index in range");
            let after = q.get(l).expect("index in range");
            let slack = relative * before.abs().max(after.abs());
            let wrong = if l < conserved {
                after - before < -slack
            } else {
                after - before > slack
            };
            if wrong {
                out.push(Violation::Monotonicity { l });
            }
        }
        let b = self.tol.barrier;
        if ex.min_rho < self.initial.min_rho - b {
            out.push(Violation::RhoBelowInitial);
        }
        if ex.max_rho > self.initial.max_rho + b {
            out.push(Violation::RhoAboveInitial);
        }
        if ex.min_u < self.initial.min_u - b {
            out.push(Violation::SupportBelowInitial);
        }
        let kappa = self.tol.f_bound_factor;
        if ex.min_f < self.initial.min_f / kappa {
            out.push(Violation::CurvatureQuotientLow);
        }
        if ex.max_f > self.initial.max_f * kappa {
            out.push(Violation::CurvatureQuotientHigh);
        }
        if !(ex.min_lambda > 0.0) {
            out.push(Violation::ConvexityLoss);
        }
        self.previous = q.clone();
        (ex, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_are_stable() {
        let codes: Vec<String> = [
            Violation::Drift,
            Violation::Monotonicity { l: -1 },
            Violation::RhoBelowInitial,
            Violation::ConvexityLoss,
        ]
        .iter()
        .map(ToString::to_string)
        .collect();
        assert_eq!(codes, ["drift", "sign-1", "rhoMin", "convexity"]);
    }
}
