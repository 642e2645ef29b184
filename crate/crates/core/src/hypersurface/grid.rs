use std::sync::Arc;

use crate::error::{Error, Result};
use crate::measure::sphere_area;
use crate::scalar::Real;

/// Uniform polar-angle grid `θ_j = jπ/(N−1)` over `S^n` for axisymmetric data,
/// both poles included.
///
/// Quadrature weights integrate a zonal function `g(θ)` against the round
/// volume form, `∫_{S^n} g ≈ Σ_j w_j g_j`. They come from interpolating `g`
/// by its cosine series through the nodes and integrating each mode against
/// `|S^{n−1}| sin^{n−1}θ` exactly (Clenshaw–Curtis for `n = 2`).
#[derive(Clone, Debug)]
pub struct PolarGrid<T> {
    n: usize,
    theta: Vec<T>,
    h: T,
    weights: Vec<T>,
}

pub const MIN_GRID_NODES: usize = 5;

impl<T: Real> PolarGrid<T> {
    pub fn uniform(n: usize, nodes: usize) -> Result<Arc<Self>> {
        if n < 2 {
            return Err(Error::Domain(format!("hypersurface dimension {n} < 2")));
        }
        if nodes < 3 {
            return Err(Error::GridTooCoarse { nodes, min: 3 });
        }
        let m = nodes - 1;
        let h = T::PI() / T::from(m).unwrap();
        let theta: Vec<T> = (0..nodes)
            .map(|j| if j == m { T::PI() } else { T::from(j).unwrap() * h })
            .collect();
        let weights = zonal_weights::<T>(n, nodes);
        Ok(Arc::new(Self { n, theta, h, weights }))
    }

    /// Rebuilds a grid from explicit nodes, which must be the uniform ones.
    pub fn from_theta(n: usize, theta: &[T]) -> Result<Arc<Self>> {
        let grid = Self::uniform(n, theta.len())?;
        let tol = T::from(1e-9).unwrap();
        for (a, b) in grid.theta.iter().zip(theta) {
            if (*a - *b).abs() > tol {
                return Err(Error::InvalidProfile(
                    "theta must be the uniform grid jπ/(N−1) including both poles".into(),
                ));
            }
        }
        Ok(grid)
    }

    /// Hypersurface dimension `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn theta(&self) -> &[T] {
        &self.theta
    }

    pub fn spacing(&self) -> T {
        self.h
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn is_pole(&self, j: usize) -> bool {
        j == 0 || j + 1 == self.theta.len()
    }

    /// `Σ_j w_j g_j`, summed in node order.
    pub fn integrate_zonal(&self, values: &[T]) -> Result<T> {
        if values.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: values.len(),
            });
        }
        Ok(self
            .weights
            .iter()
            .zip(values)
            .fold(T::zero(), |acc, (w, v)| acc + *w * *v))
    }

    /// First and second centered differences of nodal data that is even
    /// across both poles.
    pub fn differentiate(&self, values: &[T]) -> Result<(Vec<T>, Vec<T>)> {
        central_differences(values, self.h)
    }
}

/// Second-order centered differences with even ghost values at both ends.
pub fn central_differences<T: Real>(values: &[T], h: T) -> Result<(Vec<T>, Vec<T>)> {
    let len = values.len();
    if len < MIN_GRID_NODES {
        return Err(Error::GridTooCoarse {
            nodes: len,
            min: MIN_GRID_NODES,
        });
    }
    let two = T::one() + T::one();
    let h2 = h * h;
    let mut d1 = vec![T::zero(); len];
    let mut d2 = vec![T::zero(); len];
    for j in 1..len - 1 {
        d1[j] = (values[j + 1] - values[j - 1]) / (two * h);
        d2[j] = (values[j + 1] - two * values[j] + values[j - 1]) / h2;
    }
    d2[0] = two * (values[1] - values[0]) / h2;
    d2[len - 1] = two * (values[len - 2] - values[len - 1]) / h2;
    Ok((d1, d2))
}

/// `∫_0^π cos(mθ) sin^p θ dθ` from the finite Fourier expansion of `sin^p`.
fn cos_sin_power_moment(m: usize, p: usize) -> f64 {
    use std::f64::consts::PI;
    let mut binom = 1.0;
    let mut total = 0.0;
    for q in 0..=p {
        if q > 0 {
            binom = binom * (p - q + 1) as f64 / q as f64;
        }
        let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
        let j = p as i64 - 2 * q as i64;
        let term = if p.is_multiple_of(2) {
            let ja = j.unsigned_abs() as usize;
            if ja == m {
                if m == 0 {
                    PI
                } else {
                    PI / 2.0
                }
            } else {
                0.0
            }
        } else {
            let mi = m as i64;
            if j == 0 || (j + mi) % 2 == 0 {
                0.0
            } else {
                2.0 * j as f64 / ((j * j - mi * mi) as f64)
            }
        };
        total += binom * sign * term;
    }
    let half_p = (p / 2) as i32;
    (-1f64).powi(half_p) * total / 2f64.powi(p as i32)
}

fn zonal_weights<T: Real>(n: usize, nodes: usize) -> Vec<T> {
    let p = n - 1;
    let m = nodes - 1;
    let moments: Vec<f64> = (0..=m).map(|k| cos_sin_power_moment(k, p)).collect();
    let area = sphere_area::<f64>(n - 1);
    let mf = m as f64;
    (0..nodes)
        .map(|j| {
            let theta = std::f64::consts::PI * j as f64 / mf;
            let mut s = 0.0;
            for (k, mom) in moments.iter().enumerate() {
                if *mom == 0.0 {
                    continue;
                }
                let half = if k == 0 || k == m { 0.5 } else { 1.0 };
                s += half * (k as f64 * theta).cos() * mom;
            }
            let cj = if j == 0 || j == m { 0.5 } else { 1.0 };
            T::from(area * 2.0 / mf * cj * s).unwrap()
        })
        .collect()
}

/// Cosine-series interpolant `g(θ) = Σ'' a_m cos(mθ)` of zonal samples on the
/// uniform grid; evaluates the function and two derivatives anywhere in `[0, π]`.
#[derive(Clone, Debug)]
pub struct CosineSeries {
    coeffs: Vec<f64>,
}

impl CosineSeries {
    pub fn from_samples(values: &[f64]) -> Result<Self> {
        if values.len() < 3 {
            return Err(Error::GridTooCoarse {
                nodes: values.len(),
                min: 3,
            });
        }
        let m = values.len() - 1;
        let mf = m as f64;
        let coeffs = (0..=m)
            .map(|k| {
                let mut s = 0.0;
                for (j, v) in values.iter().enumerate() {
                    let half = if j == 0 || j == m { 0.5 } else { 1.0 };
                    s += half * v * (k as f64 * j as f64 * std::f64::consts::PI / mf).cos();
                }
                let half = if k == 0 || k == m { 0.5 } else { 1.0 };
                half * 2.0 / mf * s
            })
            .collect();
        Ok(Self { coeffs })
    }

    /// `(g, g′, g″)` at `theta`.
    pub fn eval(&self, theta: f64) -> (f64, f64, f64) {
        let (s1, c1) = theta.sin_cos();
        let (mut s_prev, mut c_prev) = (-s1, c1);
        let (mut s, mut c) = (0.0, 1.0);
        let mut v = 0.0;
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        for (k, a) in self.coeffs.iter().enumerate() {
            let kf = k as f64;
            v += a * c;
            d1 -= a * kf * s;
            d2 -= a * kf * kf * c;
            let (s_next, c_next) = (2.0 * c1 * s - s_prev, 2.0 * c1 * c - c_prev);
            (s_prev, c_prev, s, c) = (s, c, s_next, c_next);
        }
        (v, d1, d2)
    }
}
