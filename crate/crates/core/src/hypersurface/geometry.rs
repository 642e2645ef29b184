use std::sync::Arc;

use super::grid::PolarGrid;
use super::profile::{differentiate, RadialProfile};
use crate::error::{Error, Result};
use crate::measure::sin_power_integral;
use crate::scalar::Real;
use crate::symfunc::{quotient, sigma, CurvatureVector, QuotientPackage};

/// Geometric quantities of the radial graph at one grid node.
#[derive(Clone, Debug)]
pub struct NodeGeometry<T> {
    pub theta: T,
    pub rho: T,
    /// `φ = sin ρ`.
    pub phi: T,
    /// `φ′ = cos ρ`.
    pub phi_prime: T,
    pub at_pole: bool,
    pub grad_rho: T,
    pub hess_rho: T,
    /// Support function `u = φ²/√(φ² + |∇ρ|²)`.
    pub u: T,
    /// `√(φ² + |∇ρ|²)/φ`; the radial rate of a graph moving with normal speed `f` is `f·omega_speed`.
    pub omega_speed: T,
    /// Density of `dμ_g` against the round volume element of `S^n`.
    pub area_weight: T,
    /// Principal curvature along the meridian.
    pub lambda_radial: T,
    /// Principal curvature along the parallels, multiplicity `n − 1`.
    pub lambda_angular: T,
    /// `(λ_radial, λ_angular, …, λ_angular)`.
    pub curvatures: CurvatureVector<T>,
    pub quotient: QuotientPackage<T>,
}

impl<T: Real> NodeGeometry<T> {
    /// `√(φ² + |∇ρ|²)`.
    pub fn slope_norm(&self) -> T {
        self.omega_speed * self.phi
    }

    /// Hessian of a zonal function `v` with respect to the induced metric,
    /// given `v_θ` and `v_θθ`. Returns the meridian and parallel eigenvalues.
    pub fn induced_hessian(&self, v_t: T, v_tt: T) -> (T, T) {
        let a = self.slope_norm();
        let a_t = (self.phi * self.phi_prime * self.grad_rho + self.grad_rho * self.hess_rho) / a;
        let radial = v_tt / (a * a) - a_t * v_t / (a * a * a);
        let angular = if self.at_pole {
            v_tt / (a * a)
        } else {
            let log_b_t = self.phi_prime * self.grad_rho / self.phi + self.theta.cos() / self.theta.sin();
            log_b_t * v_t / (a * a)
        };
        (radial, angular)
    }

    pub fn min_lambda(&self) -> T {
        self.lambda_radial.min(self.lambda_angular)
    }

    pub fn max_lambda(&self) -> T {
        self.lambda_radial.max(self.lambda_angular)
    }
}

/// Per-node geometry of an axisymmetric radial graph, with the curvature
/// quotient of order `k`.
#[derive(Clone, Debug)]
pub struct GeometryState<T> {
    profile: RadialProfile<T>,
    k: usize,
    nodes: Vec<NodeGeometry<T>>,
}

impl<T: Real> GeometryState<T> {
    pub fn profile(&self) -> &RadialProfile<T> {
        &self.profile
    }

    pub fn grid(&self) -> &Arc<PolarGrid<T>> {
        self.profile.grid()
    }

    pub fn n(&self) -> usize {
        self.profile.n()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn nodes(&self) -> &[NodeGeometry<T>] {
        &self.nodes
    }

    pub fn nodal(&self, f: impl Fn(&NodeGeometry<T>) -> T) -> Vec<T> {
        self.nodes.iter().map(f).collect()
    }

    /// `σ_m(λ)` at every node.
    pub fn sigma_nodal(&self, m: usize) -> Result<Vec<T>> {
        self.nodes.iter().map(|g| sigma(&g.curvatures, m)).collect()
    }

    pub fn min_lambda(&self) -> T {
        self.nodes
            .iter()
            .map(NodeGeometry::min_lambda)
            .fold(T::infinity(), T::min)
    }

    pub fn max_lambda(&self) -> T {
        self.nodes
            .iter()
            .map(NodeGeometry::max_lambda)
            .fold(T::neg_infinity(), T::max)
    }
}

/// Limit of the discrete `cot θ · v_θ` at a pole, for data `v` even across it.
///
/// Near a pole the centred first difference carries an error `h²ρ⁗/6`, twice
/// that of the second difference used for `ρ_θθ`. Adding the missing
/// `h²ρ⁗/12` from the fourth difference keeps the nodal curvature smooth
/// through the pole, so derived quantities can themselves be differenced.
pub(crate) fn pole_angular_hessian<T: Real>(rho: &[T], pole: usize, rho_tt: T, h: T) -> T {
    let (a, b, c) = if pole == 0 {
        (rho[0], rho[1], rho[2])
    } else {
        (rho[pole], rho[pole - 1], rho[pole - 2])
    };
    // fourth difference with ρ even across the pole
    let fourth = (c + c) - T::from(8).unwrap() * b + T::from(6).unwrap() * a;
    rho_tt + fourth / (T::from(12).unwrap() * h * h)
}

/// Builds the geometric package of `profile`.
///
/// With `w = √(φ² + ρ_θ²)` the principal curvatures are
/// `λ_radial = (−φρ_θθ + 2φ′ρ_θ² + φ²φ′)/w³` and
/// `λ_angular = (φφ′ − cot θ · ρ_θ)/(φ w)`. At the poles `λ_angular` takes the
/// limit of the discrete angular formula, which agrees with `λ_radial` up to
/// `O(h²)`. Fails with the node index when `λ ∉ Γ_k` somewhere.
pub fn geometry<T: Real>(profile: &RadialProfile<T>, k: usize) -> Result<GeometryState<T>> {
    let n = profile.n();
    if k >= n {
        return Err(Error::Domain(format!("quotient order {k} outside [0, {}]", n - 1)));
    }
    let (grad, hess) = differentiate(profile)?;
    let grid = profile.grid();
    let two = T::one() + T::one();
    let mut nodes = Vec::with_capacity(profile.len());
    for (j, &rho) in profile.rho().iter().enumerate() {
        let theta = grid.theta()[j];
        let (phi, phi_prime) = rho.sin_cos();
        let rt = grad[j];
        let rtt = hess[j];
        let w = (phi * phi + rt * rt).sqrt();
        let lambda_radial = (-phi * rtt + two * phi_prime * rt * rt + phi * phi * phi_prime) / (w * w * w);
        let lambda_angular = if grid.is_pole(j) {
            (phi * phi_prime - pole_angular_hessian(profile.rho(), j, rtt, grid.spacing())) / (phi * phi)
        } else {
            (phi * phi_prime - rt * theta.cos() / theta.sin()) / (phi * w)
        };
        let mut vals = vec![lambda_angular; n];
        vals[0] = lambda_radial;
        let curvatures = CurvatureVector::new(vals).map_err(|_| Error::ConeViolation { k, node: Some(j) })?;
        let q = quotient(&curvatures, k).map_err(|e| match e {
            Error::ConeViolation { k, .. } => Error::ConeViolation { k, node: Some(j) },
            other => other,
        })?;
        nodes.push(NodeGeometry {
            theta,
            rho,
            phi,
            phi_prime,
            at_pole: grid.is_pole(j),
            grad_rho: rt,
            hess_rho: rtt,
            u: phi * phi / w,
            omega_speed: w / phi,
            area_weight: phi.powi(n as i32 - 1) * w,
            lambda_radial,
            lambda_angular,
            curvatures,
            quotient: q,
        });
    }
    Ok(GeometryState {
        profile: profile.clone(),
        k,
        nodes,
    })
}

/// `∫_M g dμ_g` for nodal values `g`.
pub fn integrate<T: Real>(state: &GeometryState<T>, nodal: &[T]) -> Result<T> {
    if nodal.len() != state.nodes.len() {
        return Err(Error::LengthMismatch {
            expected: state.nodes.len(),
            got: nodal.len(),
        });
    }
    let weighted: Vec<T> = nodal
        .iter()
        .zip(&state.nodes)
        .map(|(v, g)| *v * g.area_weight)
        .collect();
    state.grid().integrate_zonal(&weighted)
}

/// Enclosed volume `∫_{S^n} ∫_0^{ρ(z)} sin^n r dr dz`.
pub fn volume<T: Real>(profile: &RadialProfile<T>) -> T {
    let n = profile.n();
    let inner: Vec<T> = profile.rho().iter().map(|r| sin_power_integral(n, *r)).collect();
    profile
        .grid()
        .integrate_zonal(&inner)
        .expect("inner integrals match grid length")
}

/// Relative defect of `(m+1)∫uσ_{m+1} = (n−m)∫φ′σ_m`, `0 ≤ m ≤ n−1`.
pub fn minkowski_residual<T: Real>(state: &GeometryState<T>, m: usize) -> Result<T> {
    let n = state.n();
    if m >= n {
        return Err(Error::Domain(format!("order {m} outside [0, {}]", n - 1)));
    }
    let s_next = state.sigma_nodal(m + 1)?;
    let s_m = state.sigma_nodal(m)?;
    let lhs_nodal: Vec<T> = state.nodes.iter().zip(&s_next).map(|(g, s)| g.u * *s).collect();
    let rhs_nodal: Vec<T> = state.nodes.iter().zip(&s_m).map(|(g, s)| g.phi_prime * *s).collect();
    let lhs = T::from(m + 1).unwrap() * integrate(state, &lhs_nodal)?;
    let rhs = T::from(n - m).unwrap() * integrate(state, &rhs_nodal)?;
    let denom = lhs.abs().max(rhs.abs());
    if denom == T::zero() {
        return Ok(T::zero());
    }
    Ok((lhs - rhs).abs() / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symfunc::c_nk;
    use std::f64::consts::PI;

    #[test]
    fn geodesic_sphere_is_umbilic() {
        for n in 2..6 {
            let r = 0.9f64;
            let p = RadialProfile::sphere(n, 65, r).unwrap();
            let k = n / 2;
            let s = geometry(&p, k).unwrap();
            let cot = 1.0 / r.tan();
            let c: f64 = c_nk(n, k);
            for g in s.nodes() {
                assert!((g.u - r.sin()).abs() < 1e-15);
                assert!((g.lambda_radial - cot).abs() < 1e-14);
                assert!((g.lambda_angular - cot).abs() < 1e-14);
                assert!((g.quotient.f - c * cot).abs() < 1e-13);
                assert_eq!(g.omega_speed, 1.0);
            }
        }
    }

    #[test]
    fn constant_quarter_pi_area_weight() {
        let p = RadialProfile::sphere(2, 9, PI / 4.0).unwrap();
        let s = geometry(&p, 0).unwrap();
        for g in s.nodes() {
            assert!((g.area_weight - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn cone_violation_carries_node() {
        // a deep dent at the north pole makes the curvature negative there
        let g = PolarGrid::<f64>::uniform(2, 41).unwrap();
        let p = RadialProfile::from_fn(g, |t| 0.8 - 0.3 * (-(t * t) / 0.02).exp()).unwrap();
        match geometry(&p, 1) {
            Err(Error::ConeViolation { k: 1, node: Some(j) }) => assert!(j < 10),
            other => panic!("expected cone violation, got {other:?}"),
        }
    }

    #[test]
    fn sphere_area_quadrature() {
        let r = 0.8f64;
        let p = RadialProfile::sphere(2, 512, r).unwrap();
        let s = geometry(&p, 0).unwrap();
        let area = integrate(&s, &vec![1.0; 512]).unwrap();
        assert!((area - 4.0 * PI * r.sin().powi(2)).abs() < 1e-8);
        assert_eq!(integrate(&s, &vec![0.0; 512]).unwrap(), 0.0);
        assert!(integrate(&s, &[1.0; 3]).is_err());
    }

    #[test]
    fn odd_integrand_vanishes() {
        let p = RadialProfile::sphere(3, 129, 0.5f64).unwrap();
        let s = geometry(&p, 0).unwrap();
        let odd: Vec<f64> = p.theta().iter().map(|t| t.cos()).collect();
        assert!(integrate(&s, &odd).unwrap().abs() < 1e-12);
    }

    #[test]
    fn volume_closed_forms() {
        let r = 0.7f64;
        let p = RadialProfile::sphere(2, 64, r).unwrap();
        let exact = 2.0 * PI * (r - r.sin() * r.cos());
        assert!((volume(&p) - exact).abs() < 1e-13);
        let near_half = RadialProfile::sphere(2, 64, PI / 2.0 - 1e-12).unwrap();
        assert!((volume(&near_half) - PI * PI).abs() < 1e-9);
        let tiny = RadialProfile::sphere(2, 64, 1e-4).unwrap();
        assert!(volume(&tiny) < 1e-11);
    }

    #[test]
    fn minkowski_on_sphere() {
        for n in 2..6 {
            let p = RadialProfile::sphere(n, 33, 1.1).unwrap();
            let s = geometry(&p, 0).unwrap();
            for m in 0..n {
                assert!(minkowski_residual(&s, m).unwrap() < 1e-12, "n={n} m={m}");
            }
            assert!(minkowski_residual(&s, n).is_err());
        }
    }
}
