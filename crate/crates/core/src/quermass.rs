//! Quermassintegrals of convex bodies bounded by radial graphs, their closed
//! forms on geodesic balls, and the isoperimetric-type inequalities between
//! them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypersurface::{integrate, volume, GeometryState};
use crate::measure::{sin_power_integral, sphere_area};
use crate::scalar::{to_f64, Real};
use crate::symfunc::{binomial, elementary_all, gamma_cone_contains};

/// `A_{−1}, A_0, …, A_n` of one convex body.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuermassVector<T> {
    n: usize,
    /// Flow index the values were computed for, if any.
    k: Option<usize>,
    values: Vec<T>,
}

impl<T: Real> QuermassVector<T> {
    /// `values` holds `A_{−1}` first.
    pub fn new(n: usize, k: Option<usize>, values: Vec<T>) -> Result<Self> {
        if values.len() != n + 2 {
            return Err(Error::LengthMismatch {
                expected: n + 2,
                got: values.len(),
            });
        }
        Ok(Self { n, k, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> Option<usize> {
        self.k
    }

    /// `A_m` for `−1 ≤ m ≤ n`.
    pub fn get(&self, m: isize) -> Option<T> {
        if m < -1 {
            return None;
        }
        self.values.get((m + 1) as usize).copied()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn volume(&self) -> T {
        self.values[0]
    }

    pub fn area(&self) -> T {
        self.values[1]
    }
}

/// Adds the lower-order term of the `A_m` recursion to `∫σ_m`.
fn assemble<T: Real>(n: usize, vol: T, sigma_integrals: &[T]) -> Vec<T> {
    let mut a = Vec::with_capacity(n + 2);
    a.push(vol);
    for m in 0..=n {
        let tail = match m {
            0 => T::zero(),
            1 => T::from(n).unwrap() * vol,
            _ => T::from(n - m + 1).unwrap() / T::from(m - 1).unwrap() * a[m - 1],
        };
        a.push(sigma_integrals[m] + tail);
    }
    a
}

/// Quadrature of all quermassintegrals of the body enclosed by `state`.
///
/// Requires `λ ∈ Γ_n` at every node.
pub fn quermass_vector<T: Real>(state: &GeometryState<T>) -> Result<QuermassVector<T>> {
    let n = state.n();
    for (j, node) in state.nodes().iter().enumerate() {
        if !gamma_cone_contains(&node.curvatures, n)?.contained {
            return Err(Error::ConeViolation { k: n, node: Some(j) });
        }
    }
    quermass_unchecked(state)
}

/// The same quadrature without the convexity precondition; used to report
/// the state at which a run lost convexity.
pub(crate) fn quermass_unchecked<T: Real>(state: &GeometryState<T>) -> Result<QuermassVector<T>> {
    let n = state.n();
    let mut nodal = vec![Vec::with_capacity(state.nodes().len()); n + 1];
    for node in state.nodes() {
        for (m, s) in elementary_all(node.curvatures.values(), n).into_iter().enumerate() {
            nodal[m].push(s);
        }
    }
    let sigma_integrals = nodal.iter().map(|v| integrate(state, v)).collect::<Result<Vec<T>>>()?;
    let values = assemble(n, volume(state.profile()), &sigma_integrals);
    QuermassVector::new(n, Some(state.k()), values)
}

/// `A_m` of the geodesic ball of radius `r ∈ (0, π/2]` in `S^{n+1}`.
pub fn sphere_quermass<T: Real>(n: usize, m: isize, r: T) -> Result<T> {
    if m < -1 || m > n as isize {
        return Err(Error::Domain(format!("index {m} outside [-1, {n}]")));
    }
    if !(r > T::zero()) || r > T::FRAC_PI_2() {
        return Err(Error::OutOfRange {
            value: to_f64(r),
            lo: 0.0,
            hi: std::f64::consts::FRAC_PI_2,
        });
    }
    let area = sphere_area::<T>(n);
    let (s, c) = r.sin_cos();
    let sigma_integrals: Vec<T> = (0..=n)
        .map(|j| area * binomial::<T>(n, j) * s.powi((n - j) as i32) * c.powi(j as i32))
        .collect();
    let a = assemble(n, area * sin_power_integral(n, r), &sigma_integrals);
    Ok(a[(m + 1) as usize])
}

const MONOTONICITY_SAMPLES: usize = 512;
const BISECTION_TOL: f64 = 1e-12;
const BISECTION_MAX_ITER: usize = 200;

/// Checks by dense sampling that `r ↦ A_k(r)` increases strictly on `(0, π/2]`.
///
/// Near `π/2` the increments of the higher indices fall to rounding level;
/// steps within a few ulps of the running value count as flat, not decreasing.
pub fn check_monotone(n: usize, k: isize) -> Result<()> {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let sample = |i: usize| sphere_quermass(n, k, half_pi * i as f64 / MONOTONICITY_SAMPLES as f64);
    let mut prev = sample(1)?;
    let mut flat_from = None;
    for i in 2..=MONOTONICITY_SAMPLES {
        let v = sample(i)?;
        let roundoff = 8.0 * f64::EPSILON * v.abs().max(prev.abs());
        let step = v - prev;
        if step < -roundoff {
            return Err(Error::NonMonotone { n, k });
        }
        if step <= roundoff {
            flat_from.get_or_insert(i);
        } else if flat_from.is_some() {
            return Err(Error::NonMonotone { n, k });
        }
        prev = v;
    }
    // flat steps are tolerated only in the last few percent before π/2
    match flat_from {
        Some(i) if i < MONOTONICITY_SAMPLES * 9 / 10 => Err(Error::NonMonotone { n, k }),
        _ => Ok(()),
    }
}

/// Radius of the geodesic ball whose `A_k` equals `target`.
///
/// `A_n` is the same for every ball, so `k` must lie in `[−1, n−1]`.
pub fn ball_radius(n: usize, k: isize, target: f64) -> Result<f64> {
    if k < -1 || k >= n as isize {
        return Err(Error::Domain(format!(
            "A_{k} does not determine a ball radius (need -1 <= k <= {})",
            n as isize - 1
        )));
    }
    check_monotone(n, k)?;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let top = sphere_quermass(n, k, half_pi)?;
    if !(0.0..=top).contains(&target) {
        return Err(Error::OutOfRange {
            value: target,
            lo: 0.0,
            hi: top,
        });
    }
    let (mut lo, mut hi) = (0.0, half_pi);
    for _ in 0..BISECTION_MAX_ITER {
        if hi - lo < BISECTION_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if sphere_quermass(n, k, mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `ξ_{l,k}(target)`: the `A_l` of the geodesic ball with `A_k = target`.
pub fn xi(n: usize, l: isize, k: isize, target: f64) -> Result<f64> {
    if l < -1 || l > n as isize {
        return Err(Error::Domain(format!("index {l} outside [-1, {n}]")));
    }
    let r = ball_radius(n, k, target)?;
    sphere_quermass(n, l, r)
}

/// One compared pair in an [`AuditReport`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditEntry {
    pub l: isize,
    pub k: isize,
    #[serde(rename = "A_l")]
    pub a_l: f64,
    /// `ξ_{l,k}(A_k)`, absent when the inverse is undefined.
    pub xi_value: Option<f64>,
    /// `ξ_{l,k}(A_k) − A_l`.
    pub gap: Option<f64>,
    /// The pair `(−1, k)` is the proved volume comparison.
    pub proven: bool,
    pub violated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    pub n: usize,
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    pub fn violations(&self) -> usize {
        self.entries.iter().filter(|e| e.violated).count()
    }

    pub fn entry(&self, l: isize, k: isize) -> Option<&AuditEntry> {
        self.entries.iter().find(|e| e.l == l && e.k == k)
    }
}

/// Relative slack below which a negative gap is reported as a violation.
pub const AUDIT_SLACK: f64 = 1e-6;

/// Evaluates `ξ_{l,k}(A_k) − A_l` for every `−1 ≤ l < k ≤ n`.
///
/// Pairs with `k = n` are listed without a value since `A_n` does not vary
/// with the ball radius.
pub fn audit_inequalities<T: Real>(q: &QuermassVector<T>) -> AuditReport {
    let n = q.n() as isize;
    let mut entries = Vec::new();
    for k in 0..=n {
        for l in -1..k {
            let a_l = to_f64(q.get(l).expect("index in range"));
            let a_k = to_f64(q.get(k).expect("index in range"));
            let (xi_value, note) = if k == n {
                (
                    None,
                    Some("A_n is constant on geodesic balls; xi undefined".to_string()),
                )
            } else {
                match xi(q.n(), l, k, a_k) {
                    Ok(v) => (Some(v), None),
                    Err(e) => (None, Some(e.to_string())),
                }
            };
            let gap = xi_value.map(|v| v - a_l);
            let scale = a_l.abs().max(xi_value.unwrap_or(0.0).abs());
            let violated = gap.is_some_and(|g| g < -AUDIT_SLACK * scale);
            entries.push(AuditEntry {
                l,
                k,
                a_l,
                xi_value,
                gap,
                proven: l == -1,
                violated,
                note,
            });
        }
    }
    AuditReport { n: q.n(), entries }
}
