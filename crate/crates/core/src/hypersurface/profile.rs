use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::grid::PolarGrid;
use crate::error::{Error, Result};
use crate::scalar::{to_f64, Real};

/// Axisymmetric radial graph `ρ(θ)` over `S^n`, sampled on a [`PolarGrid`].
///
/// Radii stay inside `(0, π/2)`, i.e. the hypersurface lies in the open
/// hemisphere around the pole of the polar coordinates. Derivatives treat `ρ`
/// as even across both poles.
#[derive(Clone, Debug)]
pub struct RadialProfile<T> {
    grid: Arc<PolarGrid<T>>,
    rho: Vec<T>,
}

impl<T: Real> RadialProfile<T> {
    pub fn new(grid: Arc<PolarGrid<T>>, rho: Vec<T>) -> Result<Self> {
        if rho.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: rho.len(),
            });
        }
        let half_pi = T::FRAC_PI_2();
        if let Some(j) = rho
            .iter()
            .position(|r| !(r.is_finite() && *r > T::zero() && *r < half_pi))
        {
            return Err(Error::InvalidProfile(format!("rho[{j}] = {} outside (0, π/2)", rho[j])));
        }
        Ok(Self { grid, rho })
    }

    pub fn from_fn(grid: Arc<PolarGrid<T>>, f: impl Fn(T) -> T) -> Result<Self> {
        let rho = grid.theta().iter().map(|t| f(*t)).collect();
        Self::new(grid, rho)
    }

    /// Geodesic sphere of radius `r` centred at the pole.
    pub fn sphere(n: usize, nodes: usize, r: T) -> Result<Self> {
        Self::from_fn(PolarGrid::uniform(n, nodes)?, |_| r)
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn grid(&self) -> &Arc<PolarGrid<T>> {
        &self.grid
    }

    pub fn theta(&self) -> &[T] {
        self.grid.theta()
    }

    pub fn rho(&self) -> &[T] {
        &self.rho
    }

    /// Same grid, new radii.
    pub fn with_rho(&self, rho: Vec<T>) -> Result<Self> {
        Self::new(self.grid.clone(), rho)
    }

    pub fn min_rho(&self) -> T {
        self.rho.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max_rho(&self) -> T {
        self.rho.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn to_checkpoint(&self, k: usize, t: f64, seed: Option<u64>) -> Checkpoint {
        Checkpoint {
            n: self.n(),
            k,
            t,
            theta: self.theta().iter().map(|v| to_f64(*v)).collect(),
            rho: self.rho.iter().map(|v| to_f64(*v)).collect(),
            seed,
        }
    }

    pub fn from_checkpoint(cp: &Checkpoint) -> Result<Self> {
        let theta: Vec<T> = cp.theta.iter().map(|v| T::from(*v).unwrap()).collect();
        let grid = PolarGrid::from_theta(cp.n, &theta)?;
        Self::new(grid, cp.rho.iter().map(|v| T::from(*v).unwrap()).collect())
    }
}

/// `(∂_θ ρ, ∂²_θ ρ)` by second-order centered differences with even ghost
/// values across the poles.
pub fn differentiate<T: Real>(profile: &RadialProfile<T>) -> Result<(Vec<T>, Vec<T>)> {
    profile.grid().differentiate(profile.rho())
}

/// JSON snapshot of a profile during or after a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub n: usize,
    pub k: usize,
    pub t: f64,
    pub theta: Vec<f64>,
    pub rho: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Checkpoint {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}
