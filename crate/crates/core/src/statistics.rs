//! Normality statistics on standardised scores, and the direct censored-EDF
//! statistics applied to the original data.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::distributions::Family;
use crate::error::{Error, Result};
use crate::estimators::estimate;
use crate::sample::CensoredSample;
use crate::special::{ln_norm_cdf, norm_cdf};
use crate::transforms::ZScores;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StatKind {
    A2,
    W2,
    C2,
    DsA2,
    DsW2,
}

impl StatKind {
    pub const NORMALIZED: [StatKind; 3] = [StatKind::A2, StatKind::W2, StatKind::C2];
    pub const DIRECT: [StatKind; 2] = [StatKind::DsA2, StatKind::DsW2];

    pub fn name(self) -> &'static str {
        match self {
            StatKind::A2 => "A2",
            StatKind::W2 => "W2",
            StatKind::C2 => "C2",
            StatKind::DsA2 => "DS_A2",
            StatKind::DsW2 => "DS_W2",
        }
    }

    pub fn is_direct(self) -> bool {
        matches!(self, StatKind::DsA2 | StatKind::DsW2)
    }
}

impl fmt::Display for StatKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StatKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a2" | "ad" => Ok(StatKind::A2),
            "w2" | "cvm" => Ok(StatKind::W2),
            "c2" | "cf" => Ok(StatKind::C2),
            "ds_a2" | "ds-a2" => Ok(StatKind::DsA2),
            "ds_w2" | "ds-w2" => Ok(StatKind::DsW2),
            other => Err(Error::Parse(format!("unknown statistic `{other}`"))),
        }
    }
}

/// Weight parameter a of the characteristic-function statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfWeight(f64);

impl CfWeight {
    pub fn new(a: f64) -> Result<Self> {
        if a > 0.0 && a.is_finite() {
            Ok(CfWeight(a))
        } else {
            Err(Error::Domain(format!("weight must be positive, got {a}")))
        }
    }

    pub fn a(self) -> f64 {
        self.0
    }
}

impl Default for CfWeight {
    fn default() -> Self {
        CfWeight(0.5)
    }
}

fn sorted(z: &[f64]) -> Vec<f64> {
    let mut v = z.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// W² = Σ (Φ(z₍ⱼ₎) − (2j − 1)/(2r))² + 1/(12r).
pub fn cvm_statistic(z: &ZScores) -> f64 {
    cvm_of(z.values())
}

pub(crate) fn cvm_of(z: &[f64]) -> f64 {
    let r = z.len() as f64;
    let s: f64 = sorted(z)
        .iter()
        .enumerate()
        .map(|(i, &zj)| (norm_cdf(zj) - (2 * i + 1) as f64 / (2.0 * r)).powi(2))
        .sum();
    s + 1.0 / (12.0 * r)
}

/// A² = −r − (1/r) Σ [(2j − 1) ln Φ(z₍ⱼ₎) + (2r + 1 − 2j) ln(1 − Φ(z₍ⱼ₎))].
pub fn ad_statistic(z: &ZScores) -> Result<f64> {
    ad_of(z.values())
}

pub(crate) fn ad_of(z: &[f64]) -> Result<f64> {
    let r = z.len();
    let rf = r as f64;
    let mut s = 0.0;
    for (i, &zj) in sorted(z).iter().enumerate() {
        let j = (i + 1) as f64;
        let (lo, hi) = (ln_norm_cdf(zj), ln_norm_cdf(-zj));
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::Numeric(format!("Φ(z) at the boundary for z = {zj}")));
        }
        s += (2.0 * j - 1.0) * lo + (2.0 * rf + 1.0 - 2.0 * j) * hi;
    }
    Ok(-rf - s / rf)
}

/// C²_a = (1/r)√(π/a) Σⱼₖ e^{−(zⱼ−zₖ)²/(4a)} − 2√(2π/(1+2a)) Σⱼ e^{−zⱼ²/(2+4a)}
///        + r√(π/(1+a)).
pub fn cf_statistic(z: &ZScores, w: CfWeight) -> f64 {
    cf_of(z.values(), w)
}

pub(crate) fn cf_of(z: &[f64], w: CfWeight) -> f64 {
    let a = w.a();
    let r = z.len() as f64;
    let mut pairs = 0.0;
    for (j, zj) in z.iter().enumerate() {
        for zk in &z[j + 1..] {
            pairs += (-(zj - zk).powi(2) / (4.0 * a)).exp();
        }
    }
    let double = r + 2.0 * pairs;
    let single: f64 = z.iter().map(|zj| (-zj * zj / (2.0 + 4.0 * a)).exp()).sum();
    double / r * (PI / a).sqrt() - 2.0 * (2.0 * PI / (1.0 + 2.0 * a)).sqrt() * single + r * (PI / (1.0 + a)).sqrt()
}

/// Evaluates one of the normalized-score statistics.
pub fn evaluate(kind: StatKind, z: &ZScores, w: CfWeight) -> Result<f64> {
    match kind {
        StatKind::A2 => ad_statistic(z),
        StatKind::W2 => Ok(cvm_statistic(z)),
        StatKind::C2 => Ok(cf_statistic(z, w)),
        other => Err(Error::Config(format!("{other} is not computed from normal scores"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectStatistics {
    pub a2: f64,
    pub w2: f64,
}

impl DirectStatistics {
    pub fn get(&self, kind: StatKind) -> Result<f64> {
        match kind {
            StatKind::DsA2 => Ok(self.a2),
            StatKind::DsW2 => Ok(self.w2),
            other => Err(Error::Config(format!("{other} is not a direct statistic"))),
        }
    }
}

/// Type-II censored Cramér–von Mises and Anderson–Darling statistics with
/// zᵢ = F(X_{i:n}; θ̂), i ≤ r:
///
///   W²_{r,n} = Σ (zᵢ − (2i−1)/(2n))² + r/(12n²) + (n/3)(z_r − r/n)³
///   A²_{r,n} = −(1/n) Σ (2i−1)[ln zᵢ − ln(1−zᵢ)] − 2 Σ ln(1−zᵢ)
///              − (1/n)[(r−n)² ln(1−z_r) − r² ln z_r + n² z_r]
pub fn direct_statistics(s: &CensoredSample, null_family: Family) -> Result<DirectStatistics> {
    if !matches!(null_family, Family::Exponential | Family::Normal) {
        return Err(Error::UnsupportedNull(format!(
            "direct statistics are defined for exp and normal, not {}",
            null_family.name()
        )));
    }
    let est = estimate(null_family, s).map_err(|e| e.at("estimate"))?;
    let z: Vec<f64> = s.values().iter().map(|&x| est.spec.cdf(x)).collect();
    direct_from_probabilities(&z, s.n())
}

pub(crate) fn direct_from_probabilities(z: &[f64], n: usize) -> Result<DirectStatistics> {
    let r = z.len() as f64;
    let nf = n as f64;
    let zr = z[z.len() - 1];
    if z.iter().any(|&v| !(v > 0.0 && v < 1.0)) {
        return Err(Error::Numeric("fitted probability at 0 or 1".into()));
    }
    let mut w = 0.0;
    let mut sum_odd = 0.0;
    let mut sum_surv = 0.0;
    for (i, &zi) in z.iter().enumerate() {
        let k = (2 * i + 1) as f64;
        w += (zi - k / (2.0 * nf)).powi(2);
        let ls = (-zi).ln_1p();
        sum_odd += k * (zi.ln() - ls);
        sum_surv += ls;
    }
    w += r / (12.0 * nf * nf) + nf / 3.0 * (zr - r / nf).powi(3);
    let tail = (r - nf).powi(2) * (-zr).ln_1p() - r * r * zr.ln() + nf * nf * zr;
    let a = -sum_odd / nf - 2.0 * sum_surv - tail / nf;
    Ok(DirectStatistics { a2: a, w2: w })
}

/// A statistic value with its decisions at the tabulated levels.
#[derive(Debug, Clone, PartialEq)]
pub struct GofResult {
    pub statistic: StatKind,
    pub value: f64,
    /// (level, critical value), ascending in level.
    pub critical_values: Vec<(f64, f64)>,
    pub p_value: Option<f64>,
    pub warnings: Vec<String>,
}

impl GofResult {
    pub fn reject(&self, level: f64) -> Option<bool> {
        self.critical_values
            .iter()
            .find(|(l, _)| *l == level)
            .map(|&(_, cv)| self.value > cv)
    }

    pub fn decisions(&self) -> Vec<(f64, bool)> {
        self.critical_values
            .iter()
            .map(|&(l, cv)| (l, self.value > cv))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::norm_quantile;

    fn z_from_p(p: &[f64]) -> Vec<f64> {
        p.iter().map(|&q| norm_quantile(q)).collect()
    }

    #[test]
    fn cvm_examples() {
        assert!((cvm_of(&[0.0]) - 1.0 / 12.0).abs() < 1e-15);
        assert!((cvm_of(&z_from_p(&[0.9, 0.2])) - (0.0025 + 0.0225 + 1.0 / 24.0)).abs() < 1e-12);
        let r = 7;
        let plotted: Vec<f64> = (1..=r).map(|j| (2 * j - 1) as f64 / (2 * r) as f64).collect();
        assert!((cvm_of(&z_from_p(&plotted)) - 1.0 / 84.0).abs() < 1e-12);
    }

    #[test]
    fn ad_examples() {
        assert!((ad_of(&[0.0]).unwrap() - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-14);
        let v = ad_of(&z_from_p(&[0.75, 0.25])).unwrap();
        // coefficients (1, 3) at p = 0.25 and (3, 1) at p = 0.75
        assert!((v - (-2.0 - 0.25f64.ln() - 3.0 * 0.75f64.ln())).abs() < 1e-12);
        assert!(ad_of(&[0.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn cf_single_point() {
        let expect = (2.0 * PI).sqrt() - 2.0 * PI.sqrt() + (2.0 * PI / 3.0).sqrt();
        assert!((cf_of(&[0.0], CfWeight::default()) - expect).abs() < 1e-14);
        assert!((expect - 0.408_923_1).abs() < 1e-7);
    }

    #[test]
    fn cf_symmetric_in_sign() {
        let z = [-1.3, -0.2, 0.4, 1.1];
        let neg: Vec<f64> = z.iter().map(|v| -v).collect();
        let w = CfWeight::new(1.5).unwrap();
        assert_eq!(cf_of(&z, w), cf_of(&neg, w));
    }

    #[test]
    fn direct_statistics_families() {
        let s = CensoredSample::new(vec![0.1, 0.4, 0.9, 1.3], 8).unwrap();
        let d = direct_statistics(&s, Family::Exponential).unwrap();
        assert!(d.a2.is_finite() && d.w2 > 0.0);
        assert!(matches!(
            direct_statistics(&s, Family::Gamma),
            Err(Error::UnsupportedNull(_))
        ));
    }

    #[test]
    fn direct_matches_integral_definitions() {
        // n ∫₀^{z_r} (F_n(t) − t)² w(t) dt with w = 1 and w = 1/(t(1 − t)).
        use crate::quad::integrate;
        let z = [0.05, 0.21, 0.33, 0.48, 0.52, 0.77];
        for n in [6usize, 10, 25] {
            let nf = n as f64;
            let d = direct_from_probabilities(&z, n).unwrap();
            let (mut w, mut a) = (0.0, 0.0);
            let mut lo = 0.0;
            for (i, &hi) in z.iter().enumerate() {
                let fi = i as f64 / nf;
                w += integrate(|t| (fi - t).powi(2), lo, hi, 1e-14, 1e-13).value;
                a += integrate(|t| (fi - t).powi(2) / (t * (1.0 - t)), lo, hi, 1e-14, 1e-13).value;
                lo = hi;
            }
            assert!((d.w2 - nf * w).abs() < 1e-10, "n={n}: {} vs {}", d.w2, nf * w);
            assert!((d.a2 - nf * a).abs() < 1e-9, "n={n}: {} vs {}", d.a2, nf * a);
        }
    }

    #[test]
    fn parse_names() {
        for k in StatKind::NORMALIZED.into_iter().chain(StatKind::DIRECT) {
            assert_eq!(k.name().parse::<StatKind>().unwrap(), k);
        }
        assert_eq!("ad".parse::<StatKind>().unwrap(), StatKind::A2);
    }
}
