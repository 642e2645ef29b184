use super::{binomial, elementary, elementary_all, elementary_without, gamma_cone_contains, quotient, CurvatureVector};
use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};

/// `∂σ_m/∂λ_i = σ_{m-1}(λ|i)` for every `i`.
pub fn sigma_gradient<T: Scalar>(lambda: &CurvatureVector<T>, m: usize) -> Result<Vec<T>> {
    if m > lambda.n() {
        return Err(Error::Domain(format!("sigma order {m} outside [0, {}]", lambda.n())));
    }
    Ok((0..lambda.n())
        .map(|i| elementary_without(lambda.values(), m as isize - 1, &[i]))
        .collect())
}

/// Second derivative `∂²σ_m(W)/∂W_ij ∂W_kl` at the diagonal matrix `W = diag(λ)`.
///
/// Entries of `W` are treated as independent variables.
pub fn sigma_second_derivative<T: Scalar>(
    lambda: &CurvatureVector<T>,
    m: usize,
    (i, j): (usize, usize),
    (k, l): (usize, usize),
) -> Result<T> {
    let n = lambda.n();
    if [i, j, k, l].iter().any(|&x| x >= n) {
        return Err(Error::Domain(format!("matrix index outside [0, {n})")));
    }
    if m > n {
        return Err(Error::Domain(format!("sigma order {m} outside [0, {n}]")));
    }
    let v = lambda.values();
    let mm2 = m as isize - 2;
    Ok(if i == j && k == l && i != k {
        elementary_without(v, mm2, &[i, k])
    } else if i == l && j == k && i != j {
        T::zero() - elementary_without(v, mm2, &[i, j])
    } else {
        T::zero()
    })
}

/// Right-hand side minus left-hand side of the generalized Newton–MacLaurin
/// inequality
///
/// `[(σ_k/C(n,k)) / (σ_l/C(n,l))]^{1/(k-l)} ≤ [(σ_r/C(n,r)) / (σ_s/C(n,s))]^{1/(r-s)}`.
///
/// Nonnegative for `λ ∈ Γ_k`.
pub fn newton_maclaurin_gap<T: Real>(lambda: &CurvatureVector<T>, k: usize, l: usize, r: usize, s: usize) -> Result<T> {
    let n = lambda.n();
    if !(k > l && r > s && k >= r && l >= s && k <= n) {
        return Err(Error::Domain(format!(
            "invalid index tuple (k={k}, l={l}, r={r}, s={s})"
        )));
    }
    if !gamma_cone_contains(lambda, k)?.contained {
        return Err(Error::ConeViolation { k, node: None });
    }
    let e = elementary_all(lambda.values(), k);
    let norm = |m: usize| e[m] / binomial::<T>(n, m);
    let lhs = (norm(k) / norm(l)).powf(T::one() / T::from_count(k - l));
    let rhs = (norm(r) / norm(s)).powf(T::one() / T::from_count(r - s));
    Ok(rhs - lhs)
}

/// The two gaps `(Σ F^{ii} λ_i² − F²/c_{n,k}, Σ F^{ii} − c_{n,k})`, both
/// nonnegative on `Γ_k`.
pub fn lemma42_gaps<T: Scalar>(lambda: &CurvatureVector<T>, k: usize) -> Result<(T, T)> {
    let q = quotient(lambda, k)?;
    let first = q.weighted_trace - q.f.clone() * q.f.clone() / q.c.clone();
    let second = q.trace_grad - q.c;
    Ok((first, second))
}

/// Pieces of the pinching comparison for `λ ∈ Γ_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Lemma44Parts<T> {
    /// `m(n−m)σ_m² − (m+1)(n−m+1)σ_{m+1}σ_{m−1}`.
    pub n_def: T,
    /// `Σ_{i<j} (λ_i−λ_j)² [σ_{m−1}(λ|ij)² − σ_{m−2}(λ|ij)σ_m(λ|ij)]`.
    pub n_sum: T,
    /// `(λ_1 − λ_n)² / λ_1²` with `λ_1` the largest and `λ_n` the smallest entry.
    pub pinch: T,
    /// `σ_m(λ)`, the normalizer of `n_def`.
    pub sigma_m: T,
}

pub fn lemma44_parts<T: Scalar>(lambda: &CurvatureVector<T>, m: usize) -> Result<Lemma44Parts<T>> {
    let n = lambda.n();
    if m == 0 || m >= n {
        return Err(Error::Domain(format!("order {m} outside [1, {}]", n - 1)));
    }
    if !gamma_cone_contains(lambda, n)?.contained {
        return Err(Error::ConeViolation { k: n, node: None });
    }
    let v = lambda.sorted_desc();
    let e = elementary_all(&v, m + 1);
    let us = T::from_count;
    let n_def = us(m) * us(n - m) * e[m].clone() * e[m].clone()
        - us(m + 1) * us(n - m + 1) * e[m + 1].clone() * e[m - 1].clone();

    let mi = m as isize;
    let mut n_sum = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = v[i].clone() - v[j].clone();
            let a = elementary_without(&v, mi - 1, &[i, j]);
            let b = elementary_without(&v, mi - 2, &[i, j]);
            let c = elementary_without(&v, mi, &[i, j]);
            n_sum = n_sum + d.clone() * d * (a.clone() * a - b * c);
        }
    }
    let spread = v[0].clone() - v[n - 1].clone();
    let pinch = spread.clone() * spread / (v[0].clone() * v[0].clone());
    Ok(Lemma44Parts {
        n_def,
        n_sum,
        pinch,
        sigma_m: elementary(&v, m),
    })
}
