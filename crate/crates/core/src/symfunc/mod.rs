//! Elementary symmetric functions, Gårding cones and the curvature quotient
//! `F = σ_{k+1} / σ_k`.
//!
//! Indices of curvature entries are 0-based throughout the API.

mod lemmas;
pub mod suite;

pub use lemmas::{
    lemma42_gaps, lemma44_parts, newton_maclaurin_gap, sigma_gradient, sigma_second_derivative, Lemma44Parts,
};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Principal curvatures `λ_1, …, λ_n` of one point of a hypersurface.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureVector<T> {
    values: Vec<T>,
}

impl<T: Scalar> CurvatureVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Domain(format!(
                "curvature vector needs n >= 2 entries, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite_value()) {
            return Err(Error::Domain(format!("entry {i} is not finite")));
        }
        Ok(Self { values })
    }

    /// The umbilic point `t·(1, …, 1)`.
    pub fn umbilic(n: usize, t: T) -> Result<Self> {
        Self::new(vec![t; n])
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Entries sorted in descending order.
    pub fn sorted_desc(&self) -> Vec<T> {
        let mut v = self.values.clone();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        v
    }

    pub fn min(&self) -> T {
        self.values
            .iter()
            .skip(1)
            .fold(self.values[0].clone(), |acc, v| if *v < acc { v.clone() } else { acc })
    }

    pub fn max(&self) -> T {
        self.values
            .iter()
            .skip(1)
            .fold(self.values[0].clone(), |acc, v| if *v > acc { v.clone() } else { acc })
    }

    /// `σ_m(|λ_1|, …, |λ_n|)`, the magnitude every signed term of `σ_m` is bounded by.
    pub fn natural_scale(&self, m: usize) -> T {
        let abs: Vec<T> = self.values.iter().map(Scalar::abs_value).collect();
        elementary(&abs, m)
    }
}

/// `σ_0, …, σ_upto` of `values` by the one-pass product recurrence
/// `∏ (1 + λ_i x)`, truncated at degree `upto`.
pub(crate) fn elementary_all<T: Scalar>(values: &[T], upto: usize) -> Vec<T> {
    let mut e = vec![T::zero(); upto + 1];
    e[0] = T::one();
    for (count, v) in values.iter().enumerate() {
        let top = upto.min(count + 1);
        for j in (1..=top).rev() {
            let add = v.clone() * e[j - 1].clone();
            e[j] = e[j].clone() + add;
        }
    }
    e
}

/// [`elementary_all`] of `values` with the entry at `skip` left out.
pub(crate) fn elementary_all_except<T: Scalar>(values: &[T], upto: usize, skip: usize) -> Vec<T> {
    let mut e = vec![T::zero(); upto + 1];
    e[0] = T::one();
    let mut count = 0;
    for (i, v) in values.iter().enumerate() {
        if i == skip {
            continue;
        }
        let top = upto.min(count + 1);
        for j in (1..=top).rev() {
            let add = v.clone() * e[j - 1].clone();
            e[j] = e[j].clone() + add;
        }
        count += 1;
    }
    e
}

/// `σ_m(values)`; zero when `m` exceeds the number of values.
pub(crate) fn elementary<T: Scalar>(values: &[T], m: usize) -> T {
    if m > values.len() {
        return T::zero();
    }
    elementary_all(values, m).pop().unwrap_or_else(T::one)
}

/// `σ_m` of `values` with the entries at `excluded` removed. Negative `m` or
/// `m` beyond the remaining count yield zero.
pub(crate) fn elementary_without<T: Scalar>(values: &[T], m: isize, excluded: &[usize]) -> T {
    if m < 0 {
        return T::zero();
    }
    let kept: Vec<T> = values
        .iter()
        .enumerate()
        .filter(|(i, _)| !excluded.contains(i))
        .map(|(_, v)| v.clone())
        .collect();
    elementary(&kept, m as usize)
}

/// `σ_m(λ)` with the convention `σ_0 = 1`.
pub fn sigma<T: Scalar>(lambda: &CurvatureVector<T>, m: usize) -> Result<T> {
    if m > lambda.n() {
        return Err(Error::Domain(format!("sigma order {m} outside [0, {}]", lambda.n())));
    }
    Ok(elementary(lambda.values(), m))
}

/// `σ_m(λ | excluded)`: the symmetric function with the listed entries set to zero.
pub fn sigma_excl<T: Scalar>(lambda: &CurvatureVector<T>, m: usize, excluded: &[usize]) -> Result<T> {
    let n = lambda.n();
    if excluded.is_empty() || excluded.len() > 2 {
        return Err(Error::Domain(format!(
            "exclusion set must hold 1 or 2 indices, got {}",
            excluded.len()
        )));
    }
    if let Some(&bad) = excluded.iter().find(|&&i| i >= n) {
        return Err(Error::Domain(format!("index {bad} outside [0, {n})")));
    }
    if excluded.len() == 2 && excluded[0] == excluded[1] {
        return Err(Error::Domain("repeated excluded index".into()));
    }
    if m > n - excluded.len() {
        return Err(Error::Domain(format!(
            "sigma order {m} outside [0, {}]",
            n - excluded.len()
        )));
    }
    Ok(elementary_without(lambda.values(), m as isize, excluded))
}

/// Membership of `λ` in the Gårding cone `Γ_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConeLabel {
    pub k: usize,
    pub contained: bool,
}

/// Strict test `σ_i(λ) > 0` for `1 ≤ i ≤ k`. `k = 0` is the whole space.
pub fn gamma_cone_contains<T: Scalar>(lambda: &CurvatureVector<T>, k: usize) -> Result<ConeLabel> {
    if k > lambda.n() {
        return Err(Error::Domain(format!("cone index {k} outside [0, {}]", lambda.n())));
    }
    let e = elementary_all(lambda.values(), k);
    let contained = e.iter().skip(1).all(|s| *s > T::zero());
    Ok(ConeLabel { k, contained })
}

/// Membership of the closure `Γ̄_k`, with `σ_i ≥ -slack` relative to the
/// natural scale of each `σ_i`.
pub fn gamma_closure_contains<T: Scalar>(lambda: &CurvatureVector<T>, k: usize) -> Result<bool> {
    if k > lambda.n() {
        return Err(Error::Domain(format!("cone index {k} outside [0, {}]", lambda.n())));
    }
    let e = elementary_all(lambda.values(), k);
    let abs: Vec<T> = lambda.values().iter().map(Scalar::abs_value).collect();
    let scales = elementary_all(&abs, k);
    Ok((1..=k).all(|i| {
        let floor = T::zero() - T::closure_slack(&scales[i]);
        e[i] >= floor
    }))
}

/// `c_{n,k} = σ_{k+1}(I) / σ_k(I) = (n-k)/(k+1)`.
pub fn c_nk<T: Scalar>(n: usize, k: usize) -> T {
    T::from_count(n - k) / T::from_count(k + 1)
}

/// Binomial coefficient `C(n, k)` as a scalar.
pub fn binomial<T: Scalar>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut acc = T::one();
    for i in 0..k {
        acc = acc * T::from_count(n - i) / T::from_count(i + 1);
    }
    acc
}

/// `F = σ_{k+1}/σ_k` together with its diagonal gradient.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientPackage<T> {
    pub f: T,
    /// `F^{ii} = ∂F/∂λ_i`, in the order of the input entries.
    pub grad_diag: Vec<T>,
    /// `Σ F^{ii}`.
    pub trace_grad: T,
    /// `Σ F^{ii} λ_i²`.
    pub weighted_trace: T,
    /// `c_{n,k}`.
    pub c: T,
}

/// Evaluates the curvature quotient of order `k` (`0 ≤ k ≤ n-1`).
///
/// Fails with a cone violation unless `λ ∈ Γ_k`, so callers never see a
/// division by a vanishing `σ_k`.
pub fn quotient<T: Scalar>(lambda: &CurvatureVector<T>, k: usize) -> Result<QuotientPackage<T>> {
    let n = lambda.n();
    if k >= n {
        return Err(Error::Domain(format!("quotient order {k} outside [0, {}]", n - 1)));
    }
    let vals = lambda.values();
    let e = elementary_all(vals, k + 1);
    if !e.iter().take(k + 1).skip(1).all(|s| *s > T::zero()) {
        return Err(Error::ConeViolation { k, node: None });
    }
    let sk = e[k].clone();
    let sk1 = e[k + 1].clone();
    let sk_sq = sk.clone() * sk.clone();
    let f = sk1.clone() / sk.clone();

    let mut grad_diag = Vec::with_capacity(n);
    let mut trace_grad = T::zero();
    let mut weighted_trace = T::zero();
    for i in 0..n {
        let e_i = elementary_all_except(vals, k, i);
        let sk_i = e_i[k].clone();
        let skm1_i = if k == 0 { T::zero() } else { e_i[k - 1].clone() };
        let g = (sk_i * sk.clone() - sk1.clone() * skm1_i) / sk_sq.clone();
        trace_grad = trace_grad + g.clone();
        weighted_trace = weighted_trace + g.clone() * vals[i].clone() * vals[i].clone();
        grad_diag.push(g);
    }
    if !f.is_finite_value() {
        return Err(Error::ConeViolation { k, node: None });
    }
    Ok(QuotientPackage {
        f,
        grad_diag,
        trace_grad,
        weighted_trace,
        c: c_nk(n, k),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn cv(v: &[f64]) -> CurvatureVector<f64> {
        CurvatureVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(&cv(&[1.0, 1.0, 1.0]), 2).unwrap(), 3.0);
        assert_eq!(sigma(&cv(&[1.0, 2.0, 3.0]), 2).unwrap(), 11.0);
        assert_eq!(sigma(&cv(&[-4.0, 2.5, 3.0]), 0).unwrap(), 1.0);
        assert!(matches!(sigma(&cv(&[1.0, 2.0]), 3), Err(Error::Domain(_))));
    }

    #[test]
    fn sigma_excl_examples() {
        let l = cv(&[1.0, 2.0, 3.0]);
        assert_eq!(sigma_excl(&l, 1, &[1]).unwrap(), 4.0);
        assert_eq!(sigma_excl(&l, 1, &[0, 2]).unwrap(), 2.0);
        assert_eq!(sigma_excl(&cv(&[5.0, 7.0]), 0, &[0]).unwrap(), 1.0);
        assert!(sigma_excl(&l, 1, &[3]).is_err());
        assert!(sigma_excl(&l, 3, &[0]).is_err());
        assert!(sigma_excl(&l, 1, &[1, 1]).is_err());
    }

    #[test]
    fn cone_examples() {
        assert!(gamma_cone_contains(&cv(&[1.0, 1.0, 1.0]), 3).unwrap().contained);
        assert!(!gamma_cone_contains(&cv(&[-1.0, -1.0, -1.0]), 1).unwrap().contained);
        // σ_1 = 3, σ_2 = 3 - 3 - 1 = -1
        let l = cv(&[3.0, 1.0, -1.0]);
        assert!(gamma_cone_contains(&l, 1).unwrap().contained);
        assert!(!gamma_cone_contains(&l, 2).unwrap().contained);
        assert!(gamma_cone_contains(&l, 4).is_err());
    }

    #[test]
    fn closure_accepts_boundary() {
        // σ_2(1, 0, 0) = 0: in the closure of Γ_2, not in Γ_2
        let l = cv(&[1.0, 0.0, 0.0]);
        assert!(!gamma_cone_contains(&l, 2).unwrap().contained);
        assert!(gamma_closure_contains(&l, 2).unwrap());
        assert!(!gamma_closure_contains(&cv(&[1.0, -0.5, -0.7]), 2).unwrap());
    }

    #[test]
    fn quotient_at_identity() {
        let q = quotient(&CurvatureVector::umbilic(3, 1.0f64).unwrap(), 1).unwrap();
        assert!((q.f - 1.0).abs() < 1e-15);
        assert!((q.c - 1.0).abs() < 1e-15);
        assert!((q.trace_grad - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quotient_homogeneous() {
        for (n, k) in [(2, 0), (3, 1), (4, 2), (5, 4)] {
            let t = 2.75;
            let q = quotient(&CurvatureVector::umbilic(n, t).unwrap(), k).unwrap();
            let c: f64 = c_nk(n, k);
            assert!((q.f - t * c).abs() < 1e-13 * t * c, "n={n} k={k}");
        }
    }

    #[test]
    fn quotient_k0_is_mean_curvature() {
        let l = cv(&[0.5, 2.0, 1.5]);
        let q = quotient(&l, 0).unwrap();
        assert_eq!(q.f, 4.0);
        assert_eq!(q.grad_diag, vec![1.0, 1.0, 1.0]);
        assert_eq!(q.c, 3.0);
    }

    #[test]
    fn quotient_rejects_cone_exit() {
        assert!(matches!(
            quotient(&cv(&[1.0, -1.0, 0.0]), 2),
            Err(Error::ConeViolation { k: 2, .. })
        ));
        assert!(matches!(
            quotient(&cv(&[-1.0, -1.0]), 1),
            Err(Error::ConeViolation { .. })
        ));
        assert!(quotient(&cv(&[1.0, 1.0]), 2).is_err());
    }

    #[test]
    fn exact_rational_sigma() {
        let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        let l = CurvatureVector::new(vec![r(1, 2), r(1, 3), r(-1, 6)]).unwrap();
        // σ_2 = 1/6 - 1/12 - 1/18 = 1/36
        assert_eq!(sigma(&l, 2).unwrap(), r(1, 36));
        assert_eq!(sigma(&l, 3).unwrap(), r(-1, 36));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial::<f64>(8, 3), 56.0);
        assert_eq!(binomial::<f64>(5, 0), 1.0);
        assert_eq!(binomial::<f64>(3, 4), 0.0);
        assert_eq!(c_nk::<f64>(4, 2), 2.0 / 3.0);
    }
}
