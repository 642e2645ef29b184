//! Closed-form measures on round spheres.

use crate::scalar::Real;

/// `|S^d|`, from `|S^0| = 2`, `|S^1| = 2π` and `|S^d| = 2π/(d−1)·|S^{d−2}|`.
pub fn sphere_area<T: Real>(d: usize) -> T {
    let two_pi = T::PI() + T::PI();
    let mut even = T::one() + T::one();
    let mut odd = two_pi;
    if d == 0 {
        return even;
    }
    if d == 1 {
        return odd;
    }
    let mut k = 2;
    loop {
        let next = two_pi / T::from(k - 1).unwrap() * if k % 2 == 0 { even } else { odd };
        if k % 2 == 0 {
            even = next;
        } else {
            odd = next;
        }
        if k == d {
            return next;
        }
        k += 1;
    }
}

/// `∫_0^ρ sin^n r dr` via `P_n = −sin^{n−1}ρ cos ρ / n + (n−1)/n · P_{n−2}`.
pub fn sin_power_integral<T: Real>(n: usize, rho: T) -> T {
    let (s, c) = rho.sin_cos();
    let mut p_even = rho;
    let mut p_odd = T::one() - c;
    if n == 0 {
        return p_even;
    }
    if n == 1 {
        return p_odd;
    }
    let mut out = T::zero();
    for k in 2..=n {
        let kf = T::from(k).unwrap();
        let prev = if k % 2 == 0 { p_even } else { p_odd };
        let next = -s.powi(k as i32 - 1) * c / kf + (kf - T::one()) / kf * prev;
        if k % 2 == 0 {
            p_even = next;
        } else {
            p_odd = next;
        }
        out = next;
    }
    out
}
