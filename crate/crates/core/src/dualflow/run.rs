use std::collections::{BTreeSet, HashMap};
use std::io::Write;
use std::sync::Arc;

use super::state::{g_with_bound, spherical_radius, support_closure, tilde_radius, DualState};
use crate::error::{Error, Result};
use crate::flow::{convex_start, record, Clock, FlowConfig, FlowTrace, Monitor, StepController, Termination};
use crate::hypersurface::{geometry, CosineSeries, GeometryState, PolarGrid, RadialProfile};
use crate::quermass::{quermass_unchecked, QuermassVector};

/// Root of an increasing `g` on `[0, π]` by Newton steps kept inside a bisection bracket.
fn solve_increasing(g: impl Fn(f64) -> (f64, f64), target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, std::f64::consts::PI);
    let mut x = target.clamp(lo, hi);
    for _ in 0..200 {
        let (v, d) = g(x);
        let r = v - target;
        if r == 0.0 {
            break;
        }
        if r > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let newton = x - r / d;
        let next = if d > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            x = next;
            break;
        }
        x = next;
    }
    x
}

/// `ũ` on a uniform grid in the normal angle with as many nodes as `profile`.
///
/// `ρ` is interpolated by its cosine series and each normal angle
/// `θ_ν = θ − arctan(ρ_θ/sin ρ)` is inverted for `θ`.
pub fn support_from_profile(profile: &RadialProfile<f64>) -> Result<Vec<f64>> {
    let series = CosineSeries::from_samples(profile.rho())?;
    let eval = |theta: f64| {
        let (rho, rt, rtt) = series.eval(theta);
        let (phi, phi_prime) = rho.sin_cos();
        let gt = rt / phi;
        let gtt = rtt / phi - phi_prime * rt * rt / (phi * phi);
        (rho, gt, gtt)
    };
    let last = profile.len() - 1;
    profile
        .theta()
        .iter()
        .enumerate()
        .map(|(j, &target)| {
            let theta = match j {
                0 => 0.0,
                j if j == last => std::f64::consts::PI,
                _ => solve_increasing(
                    |t| {
                        let (_, gt, gtt) = eval(t);
                        (t - gt.atan(), 1.0 - gtt / (1.0 + gt * gt))
                    },
                    target,
                ),
            };
            let (rho, gt, _) = eval(theta);
            let gt = if j == 0 || j == last { 0.0 } else { gt };
            Ok(tilde_radius(rho)? / (1.0 + gt * gt).sqrt())
        })
        .collect()
}

/// Radial profile on `grid` of the hypersurface with support function `u`
/// sampled uniformly in the normal angle.
pub fn profile_from_support(grid: &Arc<PolarGrid<f64>>, u: &[f64]) -> Result<RadialProfile<f64>> {
    if u.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: u.len(),
        });
    }
    let series = CosineSeries::from_samples(u)?;
    let last = u.len() - 1;
    let rho = grid
        .theta()
        .iter()
        .enumerate()
        .map(|(j, &target)| {
            if j == 0 || j == last {
                return spherical_radius(u[j]);
            }
            let nu = solve_increasing(
                |t| {
                    let (v, vt, vtt) = series.eval(t);
                    (t + (vt / v).atan(), (v * v + v * vtt) / (v * v + vt * vt))
                },
                target,
            );
            let (v, vt, _) = series.eval(nu);
            spherical_radius((v * v + vt * vt).sqrt())
        })
        .collect();
    RadialProfile::new(grid.clone(), rho)
}

/// Closure and rate of one support-function sample.
struct Stage {
    state: DualState<f64>,
    rate: Vec<f64>,
    bound: f64,
}

impl Stage {
    fn new(grid: &PolarGrid<f64>, u: &[f64], k: usize) -> Result<Self> {
        let state = support_closure(grid, u)?;
        if let Some(j) = state.nodes().iter().position(|d| !(d.rho_tilde < 1.0)) {
            return Err(Error::Domain(format!("graph leaves the open hemisphere at node {j}")));
        }
        let (rate, bound) = g_with_bound(&state, k)?;
        Ok(Self { state, rate, bound })
    }

    /// `max |f|` for the spherical normal speed `f = (φ/ρ̃)·G`.
    fn normal_speed(&self) -> f64 {
        self.state
            .nodes()
            .iter()
            .zip(&self.rate)
            .map(|(d, g)| (g * d.phi / d.rho_tilde).abs())
            .fold(0.0, f64::max)
    }
}

fn rk4(grid: &PolarGrid<f64>, stage: &Stage, u: &[f64], dt: f64, k: usize) -> Result<(Vec<f64>, Stage)> {
    let shifted = |rate: &[f64], scale: f64| -> Vec<f64> { u.iter().zip(rate).map(|(a, r)| a + scale * r).collect() };
    let k1 = &stage.rate;
    let k2 = Stage::new(grid, &shifted(k1, 0.5 * dt), k)?.rate;
    let k3 = Stage::new(grid, &shifted(&k2, 0.5 * dt), k)?.rate;
    let k4 = Stage::new(grid, &shifted(&k3, dt), k)?.rate;
    let next: Vec<f64> = (0..u.len())
        .map(|j| u[j] + dt / 6.0 * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j]))
        .collect();
    let stage = Stage::new(grid, &next, k)?;
    Ok((next, stage))
}

fn primal_view(grid: &Arc<PolarGrid<f64>>, u: &[f64], k: usize) -> Result<(GeometryState<f64>, QuermassVector<f64>)> {
    let state = geometry(&profile_from_support(grid, u)?, k)?;
    let q = quermass_unchecked(&state)?;
    Ok((state, q))
}

/// Result of [`dual_run`].
#[derive(Clone, Debug)]
pub struct DualOutcome {
    /// Records of the transported spherical hypersurface.
    pub trace: FlowTrace,
    /// `(min, max)` eigenvalue of `W` per record.
    pub eig_w: Vec<(f64, f64)>,
    pub termination: Termination,
    /// Time of convexity loss, blow-up or step collapse.
    pub breakdown_time: Option<f64>,
    pub final_time: f64,
    /// `ũ` on the normal-angle grid at the final time.
    pub final_support: Vec<f64>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// Smallest eigenvalue of `W` over every accepted step.
    pub min_eig_w_seen: f64,
}

impl DualOutcome {
    pub const EXTRA_COLUMNS: [&'static str; 3] = ["minEigW", "maxEigW", "breakdownTime"];

    /// Trace CSV with the `W` eigenvalue columns and the breakdown time.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let breakdown = self.breakdown_time.map(|t| t.to_string()).unwrap_or_default();
        self.trace.write_csv_with(out, &Self::EXTRA_COLUMNS, |i| {
            let (lo, hi) = self.eig_w[i];
            vec![lo.to_string(), hi.to_string(), breakdown.clone()]
        })
    }
}

/// Integrates `∂_tũ = G` on a uniform normal-angle grid from the support
/// function of `config.initial_shape`.
///
/// Uses the step policy, sample clock and monitors of the spherical solver.
/// Every record is taken on the spherical hypersurface rebuilt from `ũ`.
/// Loss of convexity, blow-up of `h̃` and step collapse end the run with a
/// breakdown time.
pub fn dual_run(config: &FlowConfig) -> Result<DualOutcome> {
    let (profile, _) = convex_start(config)?;
    let grid = profile.grid().clone();
    let k = config.k;
    let h = grid.spacing();
    let mut u = support_from_profile(&profile)?;
    let mut stage = Stage::new(&grid, &u, k).map_err(|e| Error::Config(format!("dual initial data rejected: {e}")))?;

    let (state0, q0) = primal_view(&grid, &u, k)?;
    let mut monitor = Monitor::new(&state0, &q0, config.monitor_tolerances);
    let mut trace = FlowTrace::new(config.n);
    let mut eig_w = vec![(stage.state.min_eig_w(), stage.state.max_eig_w())];
    let mut pending = BTreeSet::new();
    trace.records.push(record(0.0, &q0, *monitor.initial(), &mut pending));

    let mut clock = Clock::new(config.sample_interval, None);
    let mut ctrl = StepController::new();
    let mut t = 0.0;
    let mut observed_at = 0.0;
    let mut accepted = 0;
    let mut min_eig_w_seen = stage.state.min_eig_w();

    let mut sample = |t: f64, u: &[f64], stage: &Stage, observed_at: &mut f64, trace: &mut FlowTrace| -> bool {
        let Ok((state, q)) = primal_view(&grid, u, k) else {
            return false;
        };
        let (ex, violations) = monitor.observe(&state, &q, t - *observed_at);
        *observed_at = t;
        pending.extend(violations);
        trace.records.push(record(t, &q, ex, &mut pending));
        eig_w.push((stage.state.min_eig_w(), stage.state.max_eig_w()));
        true
    };

    let termination = loop {
        if stage.normal_speed() < config.convergence_tol {
            break Termination::Converged;
        }
        if t >= config.t_max {
            break Termination::TimeLimit;
        }
        let proposed = ctrl.factor() * (config.dt_policy.cfl_factor * h * h / stage.bound).min(config.dt_policy.dt_max);
        let (dt, t_next) = clock.clip(t, proposed, config.t_max);
        let (next, next_stage) = match rk4(&grid, &stage, &u, dt, k) {
            Ok(v) => v,
            Err(e) => {
                if ctrl.reject() {
                    continue;
                }
                break match e {
                    Error::ConvexityLoss { .. } => Termination::ConvexityLoss,
                    _ => Termination::StepCollapse,
                };
            }
        };
        ctrl.accept();
        accepted += 1;
        t = t_next;
        u = next;
        stage = next_stage;
        let min_w = stage.state.min_eig_w();
        min_eig_w_seen = min_eig_w_seen.min(min_w);
        if 1.0 / min_w > config.blowup_threshold {
            break Termination::Blowup;
        }
        if clock.take_sample(t) && !sample(t, &u, &stage, &mut observed_at, &mut trace) {
            break Termination::ConvexityLoss;
        }
    };

    if trace.last().map(|r| r.t) != Some(t) {
        sample(t, &u, &stage, &mut observed_at, &mut trace);
    }
    let breakdown_time = match termination {
        Termination::ConvexityLoss | Termination::Blowup | Termination::StepCollapse => Some(t),
        Termination::Converged | Termination::TimeLimit => None,
    };
    Ok(DualOutcome {
        trace,
        eig_w,
        termination,
        breakdown_time,
        final_time: t,
        final_support: u,
        accepted_steps: accepted,
        rejected_steps: ctrl.rejected(),
        min_eig_w_seen,
    })
}

/// Agreement of two traces at their common sample times.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceComparison {
    pub matched: usize,
    /// Largest `|ΔA_l|/|A_l|` over matched records.
    pub max_quermass_gap: f64,
    /// Largest difference of `min ρ` or `max ρ` over matched records.
    pub max_rho_gap: f64,
}

/// Compares records with bitwise equal times.
pub fn compare_traces(reference: &FlowTrace, other: &FlowTrace) -> TraceComparison {
    let by_time: HashMap<u64, usize> = other
        .records
        .iter()
        .enumerate()
        .map(|(i, r)| (r.t.to_bits(), i))
        .collect();
    let mut out = TraceComparison {
        matched: 0,
        max_quermass_gap: 0.0,
        max_rho_gap: 0.0,
    };
    for a in &reference.records {
        let Some(&i) = by_time.get(&a.t.to_bits()) else {
            continue;
        };
        let b = &other.records[i];
        out.matched += 1;
        for (x, y) in a.quermass.iter().zip(&b.quermass) {
            out.max_quermass_gap = out.max_quermass_gap.max((x - y).abs() / x.abs());
        }
        out.max_rho_gap = out
            .max_rho_gap
            .max((a.extremes.min_rho - b.extremes.min_rho).abs())
            .max((a.extremes.max_rho - b.extremes.max_rho).abs());
    }
    out
}
