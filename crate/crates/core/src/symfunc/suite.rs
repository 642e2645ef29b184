//! Randomized audit of the symmetric-function identities and inequalities.
//!
//! Samples are drawn from a seeded ChaCha stream so that a given
//! `(n_max, samples, seed)` always produces the same report.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    binomial, c_nk, elementary, elementary_all, elementary_without, gamma_closure_contains, gamma_cone_contains,
    lemma44_parts, newton_maclaurin_gap, quotient, CurvatureVector,
};

/// Relative tolerance for polynomial identities.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Relative tolerance for quantities built from quotients and roots.
pub const QUOTIENT_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub n_max: usize,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub n: usize,
    /// Cone index `k`, or the order `m` for the pinching checks.
    pub index: usize,
    pub samples: usize,
    pub failures: usize,
    /// Largest observed error in units of the allowed tolerance (≤ 1 passes).
    pub worst: f64,
}

impl CheckResult {
    fn new(check: &str, n: usize, index: usize) -> Self {
        Self {
            check: check.to_string(),
            n,
            index,
            samples: 0,
            failures: 0,
            worst: 0.0,
        }
    }

    /// Records one evaluation whose error, measured in tolerance units, is `ratio`.
    fn record(&mut self, ratio: f64) {
        self.samples += 1;
        if !(ratio <= 1.0) {
            self.failures += 1;
        }
        if ratio.is_nan() || ratio > self.worst {
            self.worst = if ratio.is_nan() { f64::INFINITY } else { ratio };
        }
    }
}

/// Observed range of `[N_def/σ_m²] / pinch` for one `(n, m)`.
#[derive(Clone, Debug, Serialize)]
pub struct Comparability {
    pub n: usize,
    pub m: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub n_max: usize,
    pub samples: usize,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub comparability: Vec<Comparability>,
}

impl SuiteReport {
    pub fn total_failures(&self) -> usize {
        self.checks.iter().map(|c| c.failures).sum()
    }

    pub fn passed(&self) -> bool {
        self.total_failures() == 0
    }
}

/// Draws `λ ∈ Γ_k` by rejection from a box skewed towards positive entries,
/// at a random overall scale.
pub fn sample_cone<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<f64> {
    let scale = 10f64.powf(rng.random_range(-2.0..2.0));
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.5..2.5) * scale).collect();
        let lam = CurvatureVector::new(v.clone()).expect("finite sample");
        if gamma_cone_contains(&lam, k).expect("valid cone index").contained {
            return v;
        }
    }
}

/// Draws `λ ∈ Γ_n` with `max λ / min λ ≤ 10³`.
pub fn sample_positive<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let base = 10f64.powf(rng.random_range(-2.0..2.0));
    (0..n).map(|_| base * 10f64.powf(rng.random_range(-1.5..1.5))).collect()
}

fn rel(err: f64, scale: f64, tol: f64) -> f64 {
    if scale == 0.0 {
        if err == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        err.abs() / (tol * scale)
    }
}

/// One sample's worth of the additive identities:
/// `σ_k = σ_k(λ|i) + λ_i σ_{k−1}(λ|i)`, `Σ λ_i σ_{k−1}(λ|i) = kσ_k`,
/// `Σ σ_k(λ|i) = (n−k)σ_k`, and degree-`k` homogeneity.
fn check_additive(v: &[f64], k: usize, out: &mut [CheckResult; 4], t: f64) {
    let n = v.len();
    let sk = elementary(v, k);
    let abs: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    let scale = elementary(&abs, k);
    let mut worst_split: f64 = 0.0;
    let mut sum_weighted = 0.0;
    let mut sum_excl = 0.0;
    for i in 0..n {
        let a = elementary_without(v, k as isize, &[i]);
        let b = elementary_without(v, k as isize - 1, &[i]);
        worst_split = worst_split.max(rel(sk - a - v[i] * b, scale, IDENTITY_TOL));
        sum_weighted += v[i] * b;
        sum_excl += a;
    }
    out[0].record(worst_split);
    out[1].record(rel(sum_weighted - k as f64 * sk, k as f64 * scale, IDENTITY_TOL));
    out[2].record(rel(sum_excl - (n - k) as f64 * sk, n as f64 * scale, IDENTITY_TOL));
    let scaled: Vec<f64> = v.iter().map(|x| x * t).collect();
    let lhs = elementary(&scaled, k);
    let rhs = t.powi(k as i32) * sk;
    out[3].record(rel(lhs - rhs, t.powi(k as i32) * scale, IDENTITY_TOL));
}

/// Orderings and product bounds for sorted `λ ∈ Γ_k`.
fn check_orderings(v: &[f64], k: usize, res: &mut CheckResult) {
    let n = v.len();
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let abs: Vec<f64> = s.iter().map(|x| x.abs()).collect();
    let mut worst: f64 = 0.0;

    // σ_{k−1}(λ|n) ≥ … ≥ σ_{k−1}(λ|1) > 0
    let chain: Vec<f64> = (0..n).map(|i| elementary_without(&s, k as isize - 1, &[i])).collect();
    let chain_scale = elementary(&abs, k - 1).max(f64::MIN_POSITIVE);
    for i in 0..n - 1 {
        let drop = chain[i] - chain[i + 1];
        if drop > 0.0 {
            worst = worst.max(rel(drop, chain_scale, IDENTITY_TOL));
        }
    }
    if !(chain[0] > 0.0) {
        worst = f64::INFINITY;
    }
    if !(s[k - 1] > 0.0) {
        worst = f64::INFINITY;
    }
    let prod: f64 = s[..k].iter().product();
    let sk = elementary(&s, k);
    let upper = binomial::<f64>(n, k) * prod;
    if sk > upper {
        worst = worst.max(rel(sk - upper, upper, IDENTITY_TOL));
    }
    if k < n
        && gamma_cone_contains(&CurvatureVector::new(s.clone()).unwrap(), k + 1)
            .unwrap()
            .contained
        && sk < prod
    {
        worst = worst.max(rel(prod - sk, prod, IDENTITY_TOL));
    }
    res.record(worst);
}

fn check_newton_maclaurin(lam: &CurvatureVector<f64>, k: usize, res: &mut CheckResult) {
    let n = lam.n();
    let e = elementary_all(lam.values(), k);
    let mut worst: f64 = 0.0;
    for l in 0..k {
        for s in 0..=l {
            for r in (s + 1)..=k {
                let gap = newton_maclaurin_gap(lam, k, l, r, s).expect("valid tuple in cone");
                if gap < 0.0 {
                    let rhs =
                        ((e[r] / binomial::<f64>(n, r)) / (e[s] / binomial::<f64>(n, s))).powf(1.0 / (r - s) as f64);
                    worst = worst.max(rel(gap, rhs, QUOTIENT_TOL));
                } else if gap.is_nan() {
                    worst = f64::INFINITY;
                }
            }
        }
    }
    res.record(worst);
}

fn check_lemma42(lam: &CurvatureVector<f64>, k: usize, res: &mut CheckResult, upper: &mut CheckResult) {
    let n = lam.n();
    let q = quotient(lam, k).expect("sample in cone");
    let c: f64 = c_nk(n, k);
    let w_scale: f64 = q
        .grad_diag
        .iter()
        .zip(lam.values())
        .map(|(g, l)| (g * l * l).abs())
        .sum::<f64>()
        + q.f * q.f / c;
    let t_scale: f64 = q.grad_diag.iter().map(|g| g.abs()).sum::<f64>() + c;
    let gap1 = q.weighted_trace - q.f * q.f / c;
    let gap2 = q.trace_grad - c;
    let mut worst: f64 = 0.0;
    if gap1 < 0.0 || gap1.is_nan() {
        worst = worst.max(rel(gap1, w_scale, QUOTIENT_TOL));
    }
    if gap2 < 0.0 || gap2.is_nan() {
        worst = worst.max(rel(gap2, t_scale, QUOTIENT_TOL));
    }
    res.record(worst);
    if gamma_closure_contains(lam, k + 1).unwrap() {
        let over = q.trace_grad - (n - k) as f64;
        upper.record(if over > 0.0 {
            rel(over, t_scale, QUOTIENT_TOL)
        } else {
            0.0
        });
    }
}

/// Runs every check for `2 ≤ n ≤ n_max`.
pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = Vec::new();
    let mut comparability = Vec::new();

    for n in 2..=cfg.n_max {
        for k in 1..=n {
            let mut additive = [
                CheckResult::new("sigma_split", n, k),
                CheckResult::new("weighted_sum", n, k),
                CheckResult::new("excluded_sum", n, k),
                CheckResult::new("homogeneity", n, k),
            ];
            let mut order = CheckResult::new("cone_orderings", n, k);
            let mut nm = CheckResult::new("newton_maclaurin", n, k);
            let mut l42 = CheckResult::new("quotient_trace_bounds", n, k);
            let mut l42u = CheckResult::new("quotient_trace_upper", n, k);
            for _ in 0..cfg.samples {
                let v = sample_cone(&mut rng, n, k);
                let t = rng.random_range(0.1..10.0);
                check_additive(&v, k, &mut additive, t);
                check_orderings(&v, k, &mut order);
                let lam = CurvatureVector::new(v).unwrap();
                check_newton_maclaurin(&lam, k, &mut nm);
                if k < n {
                    check_lemma42(&lam, k, &mut l42, &mut l42u);
                }
            }
            checks.extend(additive);
            checks.push(order);
            checks.push(nm);
            if k < n {
                checks.push(l42);
                checks.push(l42u);
            }
        }

        for m in 1..n {
            let mut eq = CheckResult::new("pinching_sum_form", n, m);
            let mut nonneg = CheckResult::new("pinching_nonnegative", n, m);
            let mut lo = f64::INFINITY;
            let mut hi: f64 = 0.0;
            for _ in 0..cfg.samples {
                let v = sample_positive(&mut rng, n);
                let lam = CurvatureVector::new(v).unwrap();
                let p = lemma44_parts(&lam, m).expect("positive sample");
                let e = elementary_all(&lam.sorted_desc(), m + 1);
                let scale = (m * (n - m)) as f64 * e[m] * e[m] + ((m + 1) * (n - m + 1)) as f64 * e[m + 1] * e[m - 1];
                eq.record(rel(p.n_def - p.n_sum, scale, IDENTITY_TOL));
                nonneg.record(if p.n_def < 0.0 {
                    rel(p.n_def, scale, IDENTITY_TOL)
                } else {
                    0.0
                });
                if p.pinch > 1e-6 {
                    let ratio = p.n_def / (p.sigma_m * p.sigma_m) / p.pinch;
                    lo = lo.min(ratio);
                    hi = hi.max(ratio);
                }
            }
            checks.push(eq);
            checks.push(nonneg);
            comparability.push(Comparability {
                n,
                m,
                min_ratio: lo,
                max_ratio: hi,
            });
        }
    }

    SuiteReport {
        n_max: cfg.n_max,
        samples: cfg.samples,
        seed: cfg.seed,
        checks,
        comparability,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes_and_is_deterministic() {
        let cfg = SuiteConfig {
            n_max: 4,
            samples: 200,
            seed: 11,
        };
        let a = run_suite(&cfg);
        assert!(
            a.passed(),
            "{:?}",
            a.checks.iter().filter(|c| c.failures > 0).collect::<Vec<_>>()
        );
        let b = run_suite(&cfg);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn comparability_constants_are_positive() {
        let r = run_suite(&SuiteConfig {
            n_max: 5,
            samples: 300,
            seed: 3,
        });
        for c in &r.comparability {
            assert!(c.min_ratio > 0.0 && c.max_ratio.is_finite(), "{c:?}");
        }
    }

    #[test]
    fn cone_samples_land_in_cone() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k in 1..=6 {
            let v = sample_cone(&mut rng, 6, k);
            assert!(
                gamma_cone_contains(&CurvatureVector::new(v).unwrap(), k)
                    .unwrap()
                    .contained
            );
        }
    }
}
