use crate::error::{Error, Result};
use crate::hypersurface::{differentiate, geometry, pole_angular_hessian, PolarGrid, RadialProfile};
use crate::scalar::Real;
use crate::symfunc::{quotient, CurvatureVector};

/// `ρ̃ = tan(ρ/2)`, the Euclidean radius paired with the spherical radius `ρ ∈ (0, π/2]`.
pub fn tilde_radius<T: Real>(rho: T) -> Result<T> {
    if !(rho > T::zero() && rho <= T::FRAC_PI_2()) {
        return Err(Error::Domain(format!("radius {rho:?} outside (0, pi/2]")));
    }
    let two = T::one() + T::one();
    Ok((rho / two).tan())
}

/// Inverse of [`tilde_radius`].
pub fn spherical_radius<T: Real>(rho_tilde: T) -> T {
    let two = T::one() + T::one();
    two * rho_tilde.atan()
}

/// `γ = ln tan(ρ/2)` and `ρ̃ = e^γ` at every node.
pub fn gamma_transform<T: Real>(profile: &RadialProfile<T>) -> Result<(Vec<T>, Vec<T>)> {
    let rho_tilde = profile
        .rho()
        .iter()
        .map(|r| tilde_radius(*r))
        .collect::<Result<Vec<T>>>()?;
    let gamma = rho_tilde.iter().map(|r| r.ln()).collect();
    Ok((gamma, rho_tilde))
}

/// Dual quantities at one node.
#[derive(Clone, Debug, PartialEq)]
pub struct DualNode<T> {
    /// Polar angle of the Euclidean unit normal.
    pub theta_normal: T,
    pub at_pole: bool,
    /// Euclidean support function `ũ`.
    pub u: T,
    /// `∂ũ/∂θ_ν`.
    pub u_t: T,
    pub rho_tilde: T,
    pub gamma: T,
    /// `ρ̃/ũ = √(1 + |∇γ|²)`.
    pub omega: T,
    pub rho: T,
    pub phi: T,
    pub phi_prime: T,
    /// Eigenvalues of `W = ∇²ũ + ũ·id` along the meridian and the parallels.
    pub w: (T, T),
    /// Eigenvalues of `h̃ = W^{−1}`.
    pub h_tilde: (T, T),
}

impl<T: Real> DualNode<T> {
    /// Completes a node from `ũ`, `ũ_θ` and the two eigenvalues of `W`.
    fn close(theta_normal: T, at_pole: bool, u: T, u_t: T, w: (T, T), node: usize) -> Result<Self> {
        if !(u > T::zero()) {
            return Err(Error::Domain(format!(
                "support function {u:?} not positive at node {node}"
            )));
        }
        if !(w.0 > T::zero() && w.1 > T::zero()) {
            return Err(Error::ConvexityLoss { node });
        }
        let one = T::one();
        let two = one + one;
        let rho_tilde = (u * u + u_t * u_t).sqrt();
        let sq = rho_tilde * rho_tilde;
        Ok(Self {
            theta_normal,
            at_pole,
            u,
            u_t,
            rho_tilde,
            gamma: rho_tilde.ln(),
            omega: rho_tilde / u,
            rho: spherical_radius(rho_tilde),
            phi: two * rho_tilde / (one + sq),
            phi_prime: (one - sq) / (one + sq),
            w,
            h_tilde: (one / w.0, one / w.1),
        })
    }

    pub fn min_w(&self) -> T {
        self.w.0.min(self.w.1)
    }

    pub fn max_w(&self) -> T {
        self.w.0.max(self.w.1)
    }

    /// `(φ′ − 1)/(ρ̃ω)`, the shift taking `h̃` to `(φ/ρ̃)·h`.
    pub fn shift(&self) -> T {
        (self.phi_prime - T::one()) / (self.rho_tilde * self.omega)
    }
}

/// Nodal dual data of an axisymmetric hypersurface.
#[derive(Clone, Debug, PartialEq)]
pub struct DualState<T> {
    n: usize,
    nodes: Vec<DualNode<T>>,
}

impl<T: Real> DualState<T> {
    /// Dual data at the nodes of `profile`, with `h̃` from the Euclidean
    /// radial-graph formula at the profile's discrete derivatives.
    ///
    /// The normal angles are those of the graph, so they are not uniform.
    pub fn from_profile(profile: &RadialProfile<T>) -> Result<Self> {
        let (gamma, rho_tilde) = gamma_transform(profile)?;
        let graph = euclidean_weingarten(profile)?;
        let nodes = graph
            .iter()
            .enumerate()
            .map(|(j, g)| {
                if !(g.h_tilde.0 > T::zero() && g.h_tilde.1 > T::zero()) {
                    return Err(Error::ConvexityLoss { node: j });
                }
                let one = T::one();
                let omega = (one + g.gamma_t * g.gamma_t).sqrt();
                let theta = profile.theta()[j];
                let u = rho_tilde[j] / omega;
                let mut node = DualNode::close(
                    theta - g.gamma_t.atan(),
                    profile.grid().is_pole(j),
                    u,
                    rho_tilde[j] * g.gamma_t / omega,
                    (one / g.h_tilde.0, one / g.h_tilde.1),
                    j,
                )?;
                node.gamma = gamma[j];
                Ok(node)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n: profile.n(), nodes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &[DualNode<T>] {
        &self.nodes
    }

    /// Smallest eigenvalue of `W` over all nodes; positive iff `M̃` is strictly convex.
    pub fn min_eig_w(&self) -> T {
        self.nodes.iter().map(DualNode::min_w).fold(T::infinity(), T::min)
    }

    pub fn max_eig_w(&self) -> T {
        self.nodes.iter().map(DualNode::max_w).fold(T::neg_infinity(), T::max)
    }
}

struct GraphNode<T> {
    gamma_t: T,
    h_tilde: (T, T),
}

/// `h̃` of the Euclidean graph `e^γ z` from `γ_θ = ρ_θ/φ` and
/// `γ_θθ = ρ_θθ/φ − φ′ρ_θ²/φ²`:
/// `h̃_rad = (1 + γ_θ² − γ_θθ)/(ρ̃ω³)`, `h̃_ang = (1 − cot θ · γ_θ)/(ρ̃ω)`.
fn euclidean_weingarten<T: Real>(profile: &RadialProfile<T>) -> Result<Vec<GraphNode<T>>> {
    let (rho_t, rho_tt) = differentiate(profile)?;
    let grid = profile.grid();
    let one = T::one();
    profile
        .rho()
        .iter()
        .enumerate()
        .map(|(j, &rho)| {
            let (phi, phi_prime) = rho.sin_cos();
            let rho_tilde = tilde_radius(rho)?;
            let gamma_t = rho_t[j] / phi;
            let gamma_tt = rho_tt[j] / phi - phi_prime * rho_t[j] * rho_t[j] / (phi * phi);
            let omega = (one + gamma_t * gamma_t).sqrt();
            let cot_term = if grid.is_pole(j) {
                pole_angular_hessian(profile.rho(), j, rho_tt[j], grid.spacing()) / phi
            } else {
                let theta = grid.theta()[j];
                gamma_t * theta.cos() / theta.sin()
            };
            Ok(GraphNode {
                gamma_t,
                h_tilde: (
                    (one + gamma_t * gamma_t - gamma_tt) / (rho_tilde * omega * omega * omega),
                    (one - cot_term) / (rho_tilde * omega),
                ),
            })
        })
        .collect()
}

/// Max-norm defect of `h = (ρ̃/φ)h̃ + ((φ′ − 1)/(φω))·id` between the
/// spherical principal curvatures and the Euclidean graph Weingarten map.
pub fn decomposition_residual<T: Real>(profile: &RadialProfile<T>) -> Result<T> {
    let state = geometry(profile, 0)?;
    let (_, rho_tilde) = gamma_transform(profile)?;
    let graph = euclidean_weingarten(profile)?;
    let mut worst = T::zero();
    for (j, (node, g)) in state.nodes().iter().zip(&graph).enumerate() {
        let omega = (T::one() + g.gamma_t * g.gamma_t).sqrt();
        let scale = rho_tilde[j] / node.phi;
        let shift = (node.phi_prime - T::one()) / (node.phi * omega);
        let radial = (node.lambda_radial - (scale * g.h_tilde.0 + shift)).abs();
        let angular = (node.lambda_angular - (scale * g.h_tilde.1 + shift)).abs();
        worst = worst.max(radial).max(angular);
    }
    Ok(worst)
}

/// Dual state of samples `ũ` on a uniform grid in the normal angle, with
/// centred differences for `∇ũ` and `∇²ũ`.
///
/// `W = diag(ũ_θθ + ũ, cot θ · ũ_θ + ũ)`; at the poles the parallel entry
/// uses the discrete limit of `cot θ · ũ_θ`. Fails with
/// [`Error::ConvexityLoss`] where `W` is not positive definite.
pub fn support_closure<T: Real>(grid: &PolarGrid<T>, u: &[T]) -> Result<DualState<T>> {
    if u.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: u.len(),
        });
    }
    let (u_t, u_tt) = grid.differentiate(u)?;
    let h = grid.spacing();
    let nodes = (0..u.len())
        .map(|j| {
            let theta = grid.theta()[j];
            let angular = if grid.is_pole(j) {
                pole_angular_hessian(u, j, u_tt[j], h)
            } else {
                u_t[j] * theta.cos() / theta.sin()
            };
            DualNode::close(
                theta,
                grid.is_pole(j),
                u[j],
                u_t[j],
                (u_tt[j] + u[j], angular + u[j]),
                j,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DualState { n: grid.n(), nodes })
}

/// Per-node `G` with the largest coefficient of `ũ_θθ` in it.
pub(crate) fn g_with_bound<T: Real>(state: &DualState<T>, k: usize) -> Result<(Vec<T>, T)> {
    let n = state.n;
    let mut bound = T::zero();
    let g = state
        .nodes
        .iter()
        .enumerate()
        .map(|(j, d)| {
            let s = d.shift();
            let mut vals = vec![d.h_tilde.1 + s; n];
            vals[0] = d.h_tilde.0 + s;
            let cone = |e: Error| match e {
                Error::ConeViolation { k, .. } => Error::ConeViolation { k, node: Some(j) },
                other => other,
            };
            let q = quotient(&CurvatureVector::new(vals).map_err(cone)?, k).map_err(cone)?;
            let weight = d.rho_tilde * d.u / d.phi;
            let stiff = q.grad_diag[0] * d.h_tilde.0 * d.h_tilde.0
                + q.grad_diag[1..].iter().fold(T::zero(), |a, g| a + *g) * d.h_tilde.1 * d.h_tilde.1;
            bound = bound.max(weight * stiff);
            Ok(q.c * d.phi_prime / d.phi * d.u * d.omega - weight * q.f)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((g, bound))
}

/// `G = c_{n,k}(φ′/φ)ũω − (ρ̃ũ/φ)·F(h̃ + ((φ′ − 1)/(ρ̃ω))·id)` at every node,
/// the rate of `ũ` at fixed normal.
///
/// The argument of `F` is `(φ/ρ̃)·h`, so it must lie in `Γ_k` as on the
/// spherical side.
pub fn g_operator<T: Real>(state: &DualState<T>, k: usize) -> Result<Vec<T>> {
    g_with_bound(state, k).map(|(g, _)| g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::speed;

    fn perturbed(n: usize, nodes: usize) -> RadialProfile<f64> {
        let g = PolarGrid::<f64>::uniform(n, nodes).unwrap();
        RadialProfile::from_fn(g, |t: f64| 0.8 + 0.05 * (2.0 * t).cos()).unwrap()
    }

    #[test]
    fn tilde_radius_examples() {
        assert!((tilde_radius(std::f64::consts::FRAC_PI_2).unwrap() - 1.0).abs() < 1e-15);
        assert!(tilde_radius(1e-9f64).unwrap() < 1e-9);
        assert!(tilde_radius(0.0f64).is_err());
        assert!(tilde_radius(2.0f64).is_err());
    }

    #[test]
    fn constant_support_is_a_round_sphere() {
        let grid = PolarGrid::<f64>::uniform(3, 33).unwrap();
        let s = 0.4;
        let state = support_closure(&grid, &vec![s; 33]).unwrap();
        for d in state.nodes() {
            assert!((d.rho_tilde - s).abs() < 1e-15);
            assert!((d.omega - 1.0).abs() < 1e-15);
            assert!((d.h_tilde.0 - 1.0 / s).abs() < 1e-12 && (d.h_tilde.1 - 1.0 / s).abs() < 1e-12);
            assert!((d.phi * d.phi + d.phi_prime * d.phi_prime - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn sphere_has_zero_g() {
        for (n, k) in [(2, 1), (3, 0), (4, 2)] {
            let p = RadialProfile::sphere(n, 33, 0.9f64).unwrap();
            let d = DualState::from_profile(&p).unwrap();
            assert!(g_operator(&d, k).unwrap().iter().all(|g| g.abs() < 1e-14));
        }
    }

    #[test]
    fn g_is_transported_speed() {
        let p = perturbed(3, 65);
        let d = DualState::from_profile(&p).unwrap();
        for k in 0..3 {
            let f = speed(&geometry(&p, k).unwrap());
            let g = g_operator(&d, k).unwrap();
            for (j, node) in d.nodes().iter().enumerate() {
                assert!((g[j] - node.rho_tilde / node.phi * f[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn convexity_loss_is_reported() {
        let grid = PolarGrid::<f64>::uniform(2, 33).unwrap();
        let u: Vec<f64> = grid.theta().iter().map(|t| 0.5 + 0.4 * (4.0 * t).cos()).collect();
        assert!(matches!(support_closure(&grid, &u), Err(Error::ConvexityLoss { .. })));
    }
}
