use crate::error::{Error, Result};
use crate::scalar::Real;

use super::grid::MIN_GRID_NODES;

/// Radial graph over the whole of `S²` sampled on a latitude-longitude grid.
///
/// Latitudes are uniform in `θ ∈ [0, π]` including both poles; longitudes are
/// uniform and periodic in `ψ ∈ [0, 2π)`. Values are stored row-major, one
/// row per latitude.
#[derive(Clone, Debug)]
pub struct SphereGrid2D<T> {
    theta: Vec<T>,
    psi: Vec<T>,
    rho: Vec<T>,
}

impl<T: Real> SphereGrid2D<T> {
    pub fn from_fn(latitudes: usize, longitudes: usize, f: impl Fn(T, T) -> T) -> Result<Self> {
        if latitudes < MIN_GRID_NODES {
            return Err(Error::GridTooCoarse {
                nodes: latitudes,
                min: MIN_GRID_NODES,
            });
        }
        if longitudes < 4 {
            return Err(Error::GridTooCoarse {
                nodes: longitudes,
                min: 4,
            });
        }
        let pi = T::PI();
        let theta: Vec<T> = (0..latitudes)
            .map(|i| pi * T::from(i).unwrap() / T::from(latitudes - 1).unwrap())
            .collect();
        let psi: Vec<T> = (0..longitudes)
            .map(|j| (pi + pi) * T::from(j).unwrap() / T::from(longitudes).unwrap())
            .collect();
        let mut rho = Vec::with_capacity(latitudes * longitudes);
        for &t in &theta {
            for &p in &psi {
                rho.push(f(t, p));
            }
        }
        Self::new(theta, psi, rho)
    }

    fn new(theta: Vec<T>, psi: Vec<T>, rho: Vec<T>) -> Result<Self> {
        let half_pi = T::FRAC_PI_2();
        for (idx, r) in rho.iter().enumerate() {
            if !r.is_finite() || *r <= T::zero() || *r >= half_pi {
                return Err(Error::InvalidProfile(format!(
                    "rho at node {idx} is {r:?}, outside (0, pi/2)"
                )));
            }
        }
        Ok(Self { theta, psi, rho })
    }

    pub fn latitudes(&self) -> usize {
        self.theta.len()
    }

    pub fn longitudes(&self) -> usize {
        self.psi.len()
    }

    pub fn theta(&self) -> &[T] {
        &self.theta
    }

    pub fn psi(&self) -> &[T] {
        &self.psi
    }

    pub fn rho(&self, i: usize, j: usize) -> T {
        self.rho[i * self.psi.len() + j % self.psi.len()]
    }
}

/// Full-tensor geometry at one interior latitude-longitude node.
#[derive(Clone, Debug)]
pub struct TensorNode<T> {
    pub lat: usize,
    pub lon: usize,
    pub theta: T,
    pub psi: T,
    pub u: T,
    pub metric: [[T; 2]; 2],
    pub second_form: [[T; 2]; 2],
    /// Mixed tensor `g^{im}h_{mj}`.
    pub weingarten: [[T; 2]; 2],
    /// Principal curvatures, smaller first.
    pub lambda: (T, T),
    pub area_weight: T,
    /// `|(gW)_{12} − (gW)_{21}|` relative to `max |h|`.
    pub self_adjoint_defect: T,
}

/// Geometry of a [`SphereGrid2D`] on every interior latitude.
#[derive(Clone, Debug)]
pub struct TensorGeometry<T> {
    longitudes: usize,
    nodes: Vec<TensorNode<T>>,
}

impl<T: Real> TensorGeometry<T> {
    pub fn nodes(&self) -> &[TensorNode<T>] {
        &self.nodes
    }

    /// Node at latitude `lat` (interior, `1 ≤ lat ≤ latitudes − 2`) and longitude `lon`.
    pub fn node(&self, lat: usize, lon: usize) -> Option<&TensorNode<T>> {
        if lat == 0 {
            return None;
        }
        self.nodes.get((lat - 1) * self.longitudes + lon)
    }
}

/// Evaluates `g = φ²e + ∇ρ⊗∇ρ` and
/// `h = (−φ∇²ρ + 2φ′∇ρ⊗∇ρ + φ²φ′e)/√(φ² + |∇ρ|²)` as 2×2 tensors, with
/// covariant derivatives of the round metric `e = dθ² + sin²θ dψ²`.
///
/// Pole rows are coordinate-singular and are skipped.
pub fn geometry_full_s2<T: Real>(grid: &SphereGrid2D<T>) -> Result<TensorGeometry<T>> {
    let nt = grid.latitudes();
    let np = grid.longitudes();
    let two = T::one() + T::one();
    let ht = grid.theta[1] - grid.theta[0];
    let hp = grid.psi[1] - grid.psi[0];
    let mut nodes = Vec::with_capacity((nt - 2) * np);
    for i in 1..nt - 1 {
        let theta = grid.theta[i];
        let (st, ct) = theta.sin_cos();
        for j in 0..np {
            let jm = (j + np - 1) % np;
            let jp = (j + 1) % np;
            let r = grid.rho(i, j);
            let r_t = (grid.rho(i + 1, j) - grid.rho(i - 1, j)) / (two * ht);
            let r_tt = (grid.rho(i + 1, j) - two * r + grid.rho(i - 1, j)) / (ht * ht);
            let r_p = (grid.rho(i, jp) - grid.rho(i, jm)) / (two * hp);
            let r_pp = (grid.rho(i, jp) - two * r + grid.rho(i, jm)) / (hp * hp);
            let r_tp = (grid.rho(i + 1, jp) - grid.rho(i + 1, jm) - grid.rho(i - 1, jp) + grid.rho(i - 1, jm))
                / (two * two * ht * hp);

            let hess = [
                [r_tt, r_tp - ct / st * r_p],
                [r_tp - ct / st * r_p, r_pp + st * ct * r_t],
            ];
            let e = [[T::one(), T::zero()], [T::zero(), st * st]];
            let grad = [r_t, r_p];
            let grad_sq = r_t * r_t + r_p * r_p / (st * st);
            let (phi, phi_prime) = r.sin_cos();
            let w = (phi * phi + grad_sq).sqrt();

            let mut g = [[T::zero(); 2]; 2];
            let mut h = [[T::zero(); 2]; 2];
            for a in 0..2 {
                for b in 0..2 {
                    g[a][b] = phi * phi * e[a][b] + grad[a] * grad[b];
                    h[a][b] =
                        (-phi * hess[a][b] + two * phi_prime * grad[a] * grad[b] + phi * phi * phi_prime * e[a][b]) / w;
                }
            }
            let det_g = g[0][0] * g[1][1] - g[0][1] * g[1][0];
            if !(det_g > T::zero()) || !det_g.is_finite() {
                return Err(Error::DegenerateMetric { node: i * np + j });
            }
            let g_inv = [[g[1][1] / det_g, -g[0][1] / det_g], [-g[1][0] / det_g, g[0][0] / det_g]];
            let mut wein = [[T::zero(); 2]; 2];
            for a in 0..2 {
                for b in 0..2 {
                    wein[a][b] = g_inv[a][0] * h[0][b] + g_inv[a][1] * h[1][b];
                }
            }

            // eigenvalues of W; the half-difference form avoids cancellation near umbilic points
            let mean = (wein[0][0] + wein[1][1]) / two;
            let half_diff = (wein[0][0] - wein[1][1]) / two;
            let rad = (half_diff * half_diff + wein[0][1] * wein[1][0]).max(T::zero()).sqrt();
            let lambda = (mean - rad, mean + rad);

            let mut gw = [[T::zero(); 2]; 2];
            for a in 0..2 {
                for b in 0..2 {
                    gw[a][b] = g[a][0] * wein[0][b] + g[a][1] * wein[1][b];
                }
            }
            let h_scale = h.iter().flatten().fold(T::zero(), |m, v| m.max(v.abs()));
            let defect = (gw[0][1] - gw[1][0]).abs() / h_scale.max(T::min_positive_value());

            nodes.push(TensorNode {
                lat: i,
                lon: j,
                theta,
                psi: grid.psi[j],
                u: phi * phi / w,
                metric: g,
                second_form: h,
                weingarten: wein,
                lambda,
                area_weight: det_g.sqrt() / st,
                self_adjoint_defect: defect,
            });
        }
    }
    Ok(TensorGeometry { longitudes: np, nodes })
}
