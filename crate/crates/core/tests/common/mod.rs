#![allow(dead_code)]

//! Kolmogorov–Smirnov helpers shared by the integration tests.

/// Asymptotic Kolmogorov tail Q(λ) = 2 Σ (−1)^{k−1} e^{−2k²λ²}.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += if k as i64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// p-value for a KS distance with effective size `en`, with the usual
/// small-sample correction.
pub fn ks_pvalue(d: f64, en: f64) -> f64 {
    let s = en.sqrt();
    kolmogorov_q((s + 0.12 + 0.11 / s) * d)
}

/// One-sample KS test of `data` against `cdf`; returns (D, p).
pub fn ks_one_sample(data: &[f64], cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    let mut v = data.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / m - f).max(f - i as f64 / m);
    }
    (d, ks_pvalue(d, m))
}

/// Two-sample KS test; returns (D, p).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (m, n) = (x.len(), y.len());
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < m && j < n {
        let t = x[i].min(y[j]);
        while i < m && x[i] <= t {
            i += 1;
        }
        while j < n && y[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / m as f64 - j as f64 / n as f64).abs());
    }
    let en = (m * n) as f64 / (m + n) as f64;
    (d, ks_pvalue(d, en))
}

/// Bonferroni-adjusted smallest p-value of a family.
pub fn bonferroni_min(ps: &[f64]) -> f64 {
    let min = ps.iter().copied().fold(1.0, f64::min);
    (min * ps.len() as f64).min(1.0)
}
