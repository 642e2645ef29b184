//! Consistency checks of the discrete flow against the evolution equations
//! of the support function, the curvature quotient and the quermassintegrals.

use serde::Serialize;

use super::solver::{radial_rate, speed};
use crate::error::{Error, Result};
use crate::hypersurface::{geometry, integrate, GeometryState, NodeGeometry, RadialProfile};
use crate::quermass::quermass_unchecked;
use crate::scalar::Real;

struct Midpoint<T> {
    state: GeometryState<T>,
    speed: Vec<T>,
    c: T,
    n: T,
}

fn midpoint<T: Real>(prev: &GeometryState<T>, next: &GeometryState<T>) -> Result<Midpoint<T>> {
    if prev.k() != next.k() || prev.nodes().len() != next.nodes().len() {
        return Err(Error::Domain("states differ in grid or quotient order".into()));
    }
    let two = T::one() + T::one();
    let rho = prev
        .profile()
        .rho()
        .iter()
        .zip(next.profile().rho())
        .map(|(a, b)| (*a + *b) / two)
        .collect();
    let state = geometry(&prev.profile().with_rho(rho)?, prev.k())?;
    let speed = speed(&state);
    let c = state.nodes()[0].quotient.c;
    let n = T::from(state.n()).unwrap();
    Ok(Midpoint { state, speed, c, n })
}

/// `∂_t` along the normal trajectories from a difference at fixed `θ`.
///
/// Points moving with normal speed `f` drift in `θ` at rate
/// `−f ρ_θ/(φ√(φ² + ρ_θ²))`.
fn normal_time_derivative<T: Real>(g: &NodeGeometry<T>, f: T, at_fixed_theta: T, v_t: T) -> T {
    at_fixed_theta - f * g.grad_rho * v_t / (g.phi * g.slope_norm())
}

/// `F^{ij}∇_i∇_j v` for a zonal `v` with derivatives `v_t`, `v_tt`.
fn elliptic_part<T: Real>(g: &NodeGeometry<T>, n: T, v_t: T, v_tt: T) -> T {
    let (radial, angular) = g.induced_hessian(v_t, v_tt);
    g.quotient.grad_diag[0] * radial + (n - T::one()) * g.quotient.grad_diag[1] * angular
}

/// `⟨∇Φ, ∇v⟩` for `Φ′ = φ`.
fn grad_phi_dot<T: Real>(g: &NodeGeometry<T>, v_t: T) -> T {
    let a = g.slope_norm();
    g.phi * g.grad_rho * v_t / (a * a)
}

/// Max-norm residual of
/// `∂_tu − uF^{ij}∇_i∇_ju = −c∇Φ·∇φ′ + F∇Φ·∇u + (cφ′ − 2uF)φ′ + uF^{ij}(h²)_{ij}u`
/// between two consecutive states, with spatial terms at the midpoint.
pub fn evolution_residual_u<T: Real>(prev: &GeometryState<T>, next: &GeometryState<T>, dt: T) -> Result<T> {
    let mid = midpoint(prev, next)?;
    let grid = mid.state.grid();
    let u_mid = mid.state.nodal(|g| g.u);
    let (u_t, u_tt) = grid.differentiate(&u_mid)?;
    let two = T::one() + T::one();
    let mut worst = T::zero();
    for (j, g) in mid.state.nodes().iter().enumerate() {
        let q = &g.quotient;
        let dudt = normal_time_derivative(g, mid.speed[j], (next.nodes()[j].u - prev.nodes()[j].u) / dt, u_t[j]);
        let lhs = dudt - g.u * elliptic_part(g, mid.n, u_t[j], u_tt[j]);
        let a = g.slope_norm();
        let grad_phi_dot_phi_prime = -(g.phi * g.grad_rho / a).powi(2);
        let rhs = -mid.c * grad_phi_dot_phi_prime
            + q.f * grad_phi_dot(g, u_t[j])
            + (mid.c * g.phi_prime - two * g.u * q.f) * g.phi_prime
            + g.u * g.u * q.weighted_trace;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Max-norm residual of
/// `∂_tF − uF^{ml}∇_m∇_lF = 2F^{ml}∇_mu∇_lF + F∇Φ·∇F − [cF^{ml}(h²)_{ml} − F²]φ′ + uF[ΣF^{mm} − c]`.
pub fn evolution_residual_f<T: Real>(prev: &GeometryState<T>, next: &GeometryState<T>, dt: T) -> Result<T> {
    Ok(residual_f_nodal(prev, next, dt)?.into_iter().fold(T::zero(), T::max))
}

/// Nodal absolute residuals behind [`evolution_residual_f`].
pub fn residual_f_nodal<T: Real>(prev: &GeometryState<T>, next: &GeometryState<T>, dt: T) -> Result<Vec<T>> {
    let mid = midpoint(prev, next)?;
    let grid = mid.state.grid();
    let f_mid = mid.state.nodal(|g| g.quotient.f);
    let u_mid = mid.state.nodal(|g| g.u);
    let (f_t, f_tt) = grid.differentiate(&f_mid)?;
    let (u_t, _) = grid.differentiate(&u_mid)?;
    let two = T::one() + T::one();
    let mut out = Vec::with_capacity(mid.state.nodes().len());
    for (j, g) in mid.state.nodes().iter().enumerate() {
        let q = &g.quotient;
        let dfdt = normal_time_derivative(
            g,
            mid.speed[j],
            (next.nodes()[j].quotient.f - prev.nodes()[j].quotient.f) / dt,
            f_t[j],
        );
        let lhs = dfdt - g.u * elliptic_part(g, mid.n, f_t[j], f_tt[j]);
        let a = g.slope_norm();
        let gradient_coupling = q.grad_diag[0] * u_t[j] * f_t[j] / (a * a);
        let rhs = two * gradient_coupling + q.f * grad_phi_dot(g, f_t[j])
            - (mid.c * q.weighted_trace - q.f * q.f) * g.phi_prime
            + g.u * q.f * (q.trace_grad - mid.c);
        out.push((lhs - rhs).abs());
    }
    Ok(out)
}

/// Rate of one quermassintegral along the flow computed two ways.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QuermassRate {
    pub l: isize,
    /// Central difference of `A_l` along the discrete radial rate.
    pub finite_difference: f64,
    /// `(l+1)∫σ_{l+1}f dμ`.
    pub quadrature: f64,
}

impl QuermassRate {
    pub fn residual(&self) -> f64 {
        (self.finite_difference - self.quadrature).abs()
    }
}

/// `dA_l/dt` for `−1 ≤ l ≤ n` at `profile`, by a central difference of size
/// `delta` along the radial rate and by the first-variation formula
/// (`∫f dμ` for the volume, zero for the constant `A_n`).
pub fn quermass_rates(profile: &RadialProfile<f64>, k: usize, delta: f64) -> Result<Vec<QuermassRate>> {
    let state = geometry(profile, k)?;
    let n = state.n();
    let rate = radial_rate(&state);
    let f = speed(&state);
    let moved = |s: f64| -> Result<Vec<f64>> {
        let rho = profile.rho().iter().zip(&rate).map(|(r, v)| r + s * v).collect();
        let st = geometry(&profile.with_rho(rho)?, k)?;
        Ok(quermass_unchecked(&st)?.values().to_vec())
    };
    let plus = moved(delta)?;
    let minus = moved(-delta)?;
    let mut out = Vec::with_capacity(n + 2);
    for l in -1..=n as isize {
        let i = (l + 1) as usize;
        let quadrature = match l {
            -1 => integrate(&state, &f)?,
            l if l == n as isize => 0.0,
            _ => {
                let sigma = state.sigma_nodal(i)?;
                let nodal: Vec<f64> = sigma.iter().zip(&f).map(|(s, v)| s * v).collect();
                (l + 1) as f64 * integrate(&state, &nodal)?
            }
        };
        out.push(QuermassRate {
            l,
            finite_difference: (plus[i] - minus[i]) / (2.0 * delta),
            quadrature,
        });
    }
    Ok(out)
}
