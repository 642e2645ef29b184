use crate::error::{Error, Result};
use crate::hypersurface::{geometry, GeometryState, RadialProfile};
use crate::scalar::Real;

/// Normal speed `f = c_{n,k}φ′ − u·σ_{k+1}/σ_k` at every node.
pub fn speed<T: Real>(state: &GeometryState<T>) -> Vec<T> {
    state
        .nodes()
        .iter()
        .map(|g| g.quotient.c * g.phi_prime - g.u * g.quotient.f)
        .collect()
}

/// `∂_tρ` at fixed `θ`: the normal speed times `√(φ² + ρ_θ²)/φ`.
pub fn radial_rate<T: Real>(state: &GeometryState<T>) -> Vec<T> {
    speed(state)
        .into_iter()
        .zip(state.nodes())
        .map(|(f, g)| f * g.omega_speed)
        .collect()
}

/// Largest coefficient of `ρ_θθ` in the radial rate, `φ²·ΣF^{ii}/(φ² + ρ_θ²)^{3/2}`.
pub fn diffusion_bound<T: Real>(state: &GeometryState<T>) -> T {
    state
        .nodes()
        .iter()
        .map(|g| {
            let w = g.slope_norm();
            g.phi * g.phi * g.quotient.trace_grad / (w * w * w)
        })
        .fold(T::zero(), T::max)
}

/// Explicit step size `cfl·h²/D` for diffusion bound `D`.
pub fn stable_dt<T: Real>(state: &GeometryState<T>, cfl: T) -> T {
    let h = state.grid().spacing();
    let d = diffusion_bound(state);
    if d > T::zero() {
        cfl * h * h / d
    } else {
        T::infinity()
    }
}

fn shifted<T: Real>(profile: &RadialProfile<T>, base: &[T], rate: &[T], scale: T) -> Result<RadialProfile<T>> {
    let rho = base.iter().zip(rate).map(|(r, v)| *r + scale * *v).collect();
    profile.with_rho(rho)
}

/// One classical Runge–Kutta step of `∂_tρ = f·√(φ² + ρ_θ²)/φ`.
///
/// Returns the new profile with its geometry. Any stage or the result
/// leaving `(0, π/2)` or the cone `Γ_k` is an error; callers retry with a
/// smaller step.
pub fn advance<T: Real>(profile: &RadialProfile<T>, dt: T, k: usize) -> Result<(RadialProfile<T>, GeometryState<T>)> {
    advance_state(&geometry(profile, k)?, dt)
}

/// [`advance`] starting from an already evaluated geometry.
pub fn advance_state<T: Real>(state: &GeometryState<T>, dt: T) -> Result<(RadialProfile<T>, GeometryState<T>)> {
    if !(dt > T::zero()) {
        return Err(Error::Domain(format!("step size {dt:?} must be positive")));
    }
    let k = state.k();
    let profile = state.profile();
    let two = T::one() + T::one();
    let six = two + two + two;
    let base = profile.rho();
    let k1 = radial_rate(state);
    let k2 = radial_rate(&geometry(&shifted(profile, base, &k1, dt / two)?, k)?);
    let k3 = radial_rate(&geometry(&shifted(profile, base, &k2, dt / two)?, k)?);
    let k4 = radial_rate(&geometry(&shifted(profile, base, &k3, dt)?, k)?);
    let rho = (0..base.len())
        .map(|j| base[j] + dt / six * (k1[j] + two * (k2[j] + k3[j]) + k4[j]))
        .collect();
    let next = profile.with_rho(rho)?;
    let state = geometry(&next, k)?;
    Ok((next, state))
}

/// [`advance`] without the geometry of the result.
pub fn step<T: Real>(profile: &RadialProfile<T>, dt: T, k: usize) -> Result<RadialProfile<T>> {
    advance(profile, dt, k).map(|(p, _)| p)
}

/// Step-size multiplier applied on top of the stability limit.
///
/// Rejections halve it; every 20 consecutive accepted steps grow it by 1.2
/// back towards 1.
#[derive(Clone, Debug)]
pub struct StepController {
    factor: f64,
    streak: usize,
    rejected: usize,
}

impl Default for StepController {
    fn default() -> Self {
        Self::new()
    }
}

impl StepController {
    pub const GROWTH: f64 = 1.2;
    pub const GROWTH_AFTER: usize = 20;
    /// Below this multiplier the solver gives up.
    pub const MIN_FACTOR: f64 = 1e-10;

    pub fn new() -> Self {
        Self {
            factor: 1.0,
            streak: 0,
            rejected: 0,
        }
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }

    pub fn rejected(&self) -> usize {
        self.rejected
    }

    pub fn accept(&mut self) {
        self.streak += 1;
        if self.streak >= Self::GROWTH_AFTER {
            self.factor = (self.factor * Self::GROWTH).min(1.0);
            self.streak = 0;
        }
    }

    /// Returns `false` once the multiplier has collapsed.
    pub fn reject(&mut self) -> bool {
        self.factor *= 0.5;
        self.streak = 0;
        self.rejected += 1;
        self.factor >= Self::MIN_FACTOR
    }
}
