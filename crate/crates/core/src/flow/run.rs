use std::collections::BTreeSet;

use serde::Serialize;

use super::config::FlowConfig;
use super::monitor::{Extremes, Monitor, Violation};
use super::solver::{advance_state, stable_dt, StepController};
use super::trace::{FlowRecord, FlowTrace};
use crate::error::{Error, Result};
use crate::hypersurface::{geometry, Checkpoint, GeometryState, RadialProfile};
use crate::quermass::{quermass_unchecked, quermass_vector, QuermassVector};

/// Why a run stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Termination {
    /// `max |f|` fell below the convergence tolerance.
    Converged,
    TimeLimit,
    /// `λ_min ≤ 0` after an accepted step.
    ConvexityLoss,
    /// `max |λ|` exceeded the blow-up threshold.
    Blowup,
    /// Repeated rejections drove the step size to zero.
    StepCollapse,
}

/// Result of [`run`].
#[derive(Clone, Debug)]
pub struct FlowOutcome {
    pub trace: FlowTrace,
    pub final_profile: RadialProfile<f64>,
    pub termination: Termination,
    pub final_time: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// Extremes of the initial state.
    pub initial: Extremes,
    /// Smallest principal curvature over every accepted step.
    pub min_lambda_seen: f64,
    /// Largest relative drift of `A_{k−1}` over every accepted step.
    pub max_drift: f64,
    /// In-run checkpoints, one per `checkpointEvery` interval.
    pub checkpoints: Vec<Checkpoint>,
}

impl FlowOutcome {
    pub fn final_checkpoint(&self, k: usize, seed: Option<u64>) -> Checkpoint {
        self.final_profile.to_checkpoint(k, self.final_time, seed)
    }
}

/// Geometry of the initial profile, rejecting data that is not strictly convex.
pub(crate) fn convex_start(config: &FlowConfig) -> Result<(RadialProfile<f64>, GeometryState<f64>)> {
    config.validate()?;
    let profile = config.initial_profile()?;
    let state = geometry(&profile, config.k).map_err(|e| Error::Config(format!("initial profile rejected: {e}")))?;
    if !(state.min_lambda() > 0.0) {
        return Err(Error::Config(format!(
            "initial profile is not strictly convex (min principal curvature {})",
            state.min_lambda()
        )));
    }
    Ok((profile, state))
}

/// Sample clock: record times are exact multiples of the interval.
#[derive(Clone, Debug)]
pub(crate) struct Clock {
    interval: f64,
    next_index: u64,
    checkpoint_interval: Option<f64>,
    next_checkpoint: u64,
}

impl Clock {
    pub(crate) fn new(interval: f64, checkpoint_interval: Option<f64>) -> Self {
        Self {
            interval,
            next_index: 1,
            checkpoint_interval,
            next_checkpoint: 1,
        }
    }

    pub(crate) fn next_sample(&self) -> f64 {
        self.interval * self.next_index as f64
    }

    /// Clips a proposed step so that it lands on the next sample or on `t_max`.
    /// Returns the step and the time reached.
    pub(crate) fn clip(&self, t: f64, dt: f64, t_max: f64) -> (f64, f64) {
        let stop = self.next_sample().min(t_max);
        if t + dt >= stop {
            (stop - t, stop)
        } else {
            (dt, t + dt)
        }
    }

    /// Whether `t` is a sample time; advances the clock if so.
    pub(crate) fn take_sample(&mut self, t: f64) -> bool {
        if t >= self.next_sample() {
            while self.next_sample() <= t {
                self.next_index += 1;
            }
            true
        } else {
            false
        }
    }

    pub(crate) fn take_checkpoint(&mut self, t: f64) -> bool {
        let Some(every) = self.checkpoint_interval else {
            return false;
        };
        // checkpoint times are not sample times in general; allow rounding
        let reached = t + 1e-9 * every;
        if reached >= every * self.next_checkpoint as f64 {
            while every * self.next_checkpoint as f64 <= reached {
                self.next_checkpoint += 1;
            }
            true
        } else {
            false
        }
    }
}

pub(crate) fn record(
    t: f64,
    q: &QuermassVector<f64>,
    ex: Extremes,
    violations: &mut BTreeSet<Violation>,
) -> FlowRecord {
    FlowRecord {
        t,
        quermass: q.values().to_vec(),
        extremes: ex,
        violations: std::mem::take(violations),
    }
}

/// Integrates the flow from `config.initial_shape` until convergence, `tMax`
/// or an abort condition.
///
/// Malformed configurations and initial data that is not strictly convex are
/// errors; every other way a run can end is reported in
/// [`FlowOutcome::termination`].
pub fn run(config: &FlowConfig) -> Result<FlowOutcome> {
    let (mut profile, mut state) = convex_start(config)?;
    let k = config.k;
    let q0 = quermass_vector(&state)?;
    let mut monitor = Monitor::new(&state, &q0, config.monitor_tolerances);
    let initial = *monitor.initial();
    let mut trace = FlowTrace::new(config.n);
    let mut pending = BTreeSet::new();
    trace.records.push(record(0.0, &q0, initial, &mut pending));

    let mut clock = Clock::new(config.sample_interval, config.checkpoint_every);
    let mut ctrl = StepController::new();
    let mut checkpoints = Vec::new();
    let mut t = 0.0;
    let mut accepted = 0;
    let mut min_lambda_seen = initial.min_lambda;
    let mut max_drift = 0.0f64;
    let mut last = (q0, initial);

    let termination = loop {
        if last.1.max_speed < config.convergence_tol {
            break Termination::Converged;
        }
        if t >= config.t_max {
            break Termination::TimeLimit;
        }
        let proposed = ctrl.factor() * stable_dt(&state, config.dt_policy.cfl_factor).min(config.dt_policy.dt_max);
        let (dt, t_next) = clock.clip(t, proposed, config.t_max);
        let (next, next_state) = match advance_state(&state, dt) {
            Ok(v) => v,
            Err(_) => {
                if ctrl.reject() {
                    continue;
                }
                break Termination::StepCollapse;
            }
        };
        ctrl.accept();
        accepted += 1;
        t = t_next;
        profile = next;
        state = next_state;

        let q = quermass_unchecked(&state)?;
        let (ex, violations) = monitor.observe(&state, &q, dt);
        pending.extend(violations.iter().copied());
        min_lambda_seen = min_lambda_seen.min(ex.min_lambda);
        max_drift = max_drift.max(monitor.drift(&q));
        last = (q, ex);

        let lost_convexity = violations.contains(&Violation::ConvexityLoss);
        let blown_up = ex.max_lambda.abs().max(ex.min_lambda.abs()) > config.blowup_threshold;
        if clock.take_sample(t) && !lost_convexity && !blown_up {
            trace.records.push(record(t, &last.0, ex, &mut pending));
        }
        if clock.take_checkpoint(t) {
            checkpoints.push(profile.to_checkpoint(k, t, None));
        }
        if lost_convexity {
            break Termination::ConvexityLoss;
        }
        if blown_up {
            break Termination::Blowup;
        }
    };

    if trace.last().map(|r| r.t) != Some(t) || !pending.is_empty() {
        let r = record(t, &last.0, last.1, &mut pending);
        if trace.last().map(|r| r.t) == Some(t) {
            *trace.records.last_mut().expect("trace is never empty") = r;
        } else {
            trace.records.push(r);
        }
    }

    Ok(FlowOutcome {
        trace,
        final_profile: profile,
        termination,
        final_time: t,
        accepted_steps: accepted,
        rejected_steps: ctrl.rejected(),
        initial,
        min_lambda_seen,
        max_drift,
        checkpoints,
    })
}
