//! Transformations of censored uniform order statistics to a complete
//! uniform sample, the normalising step, and the full pipeline from a
//! censored sample to standardised normal scores.

use std::fmt;
use std::str::FromStr;

use crate::distributions::Family;
use crate::error::{Error, Result};
use crate::estimators::{estimate, Estimate};
use crate::sample::CensoredSample;
use crate::special::{ln_beta_tail_cdf, ln_beta_tail_sf, norm_quantile};

/// Lower and upper clamp for probabilities fed to Φ⁻¹ or logarithms.
pub const CLAMP_EPS: f64 = 1e-12;
/// Shift applied to the later of two tied fitted probabilities.
pub const TIE_JITTER: f64 = 1e-10;
/// Minimal separation enforced between consecutive transformed values.
pub const STRICTNESS_GAP: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TransformKind {
    Ms,
    Os,
    Lhb,
    Fk1,
    Fk2,
}

impl TransformKind {
    pub const ALL: [TransformKind; 5] = [
        TransformKind::Ms,
        TransformKind::Os,
        TransformKind::Lhb,
        TransformKind::Fk1,
        TransformKind::Fk2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TransformKind::Ms => "MS",
            TransformKind::Os => "OS",
            TransformKind::Lhb => "LHB",
            TransformKind::Fk1 => "FK1",
            TransformKind::Fk2 => "FK2",
        }
    }

    pub fn apply(self, u: &UniformOrderStats) -> Result<UniformOrderStats> {
        match self {
            TransformKind::Ms => ms_transform(u),
            TransformKind::Os => os_transform(u),
            TransformKind::Lhb => lhb_transform(u),
            TransformKind::Fk1 => fk1_transform(u),
            TransformKind::Fk2 => fk2_transform(u),
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TransformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ms" => Ok(TransformKind::Ms),
            "os" => Ok(TransformKind::Os),
            "lhb" => Ok(TransformKind::Lhb),
            "fk1" => Ok(TransformKind::Fk1),
            "fk2" => Ok(TransformKind::Fk2),
            other => Err(Error::Parse(format!("unknown transform `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UniformKind {
    CensoredInput,
    TransformedOutput,
}

/// Sorted values in (0, 1): either the r observed uniform order statistics
/// of a sample of size `source_n`, or a complete transformed sample of size r.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformOrderStats {
    values: Vec<f64>,
    source_n: usize,
    kind: UniformKind,
    // ln(1 − Uⱼ) computed from the fitted distribution when it is more
    // accurate than taking logs of the rounded Uⱼ
    ln_sf: Option<Vec<f64>>,
}

impl UniformOrderStats {
    /// Censored uniform order statistics U_{1:n} ≤ … ≤ U_{r:n}.
    pub fn censored(values: Vec<f64>, n: usize) -> Result<Self> {
        if values.is_empty() || values.len() > n {
            return Err(Error::Shape(format!("need 1 ≤ r ≤ n, got r={}, n={n}", values.len())));
        }
        check_unit_sorted(&values)?;
        Ok(UniformOrderStats {
            values,
            source_n: n,
            kind: UniformKind::CensoredInput,
            ln_sf: None,
        })
    }

    /// A complete sample of size r; the values need not be sorted.
    pub fn complete(mut values: Vec<f64>) -> Result<Self> {
        values.sort_by(f64::total_cmp);
        let n = values.len();
        let mut u = Self::censored(values, n)?;
        u.kind = UniformKind::TransformedOutput;
        Ok(u)
    }

    fn output(values: Vec<f64>, source_n: usize) -> Self {
        UniformOrderStats {
            values,
            source_n,
            kind: UniformKind::TransformedOutput,
            ln_sf: None,
        }
    }

    fn with_log_survival(mut self, ln_sf: Vec<f64>) -> Self {
        debug_assert_eq!(ln_sf.len(), self.values.len());
        self.ln_sf = Some(ln_sf);
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source_n(&self) -> usize {
        self.source_n
    }

    pub fn r(&self) -> usize {
        self.values.len()
    }

    pub fn kind(&self) -> UniformKind {
        self.kind
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

fn check_unit_sorted(values: &[f64]) -> Result<()> {
    for (i, &v) in values.iter().enumerate() {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::Domain(format!(
                "uniform order statistic {} is {v}, outside (0, 1)",
                i + 1
            )));
        }
        if i > 0 && v < values[i - 1] {
            return Err(Error::Shape(format!("values not sorted at position {}", i + 1)));
        }
    }
    Ok(())
}

fn no_ties(values: &[f64]) -> Result<()> {
    match values.windows(2).position(|w| w[1] <= w[0]) {
        Some(i) => Err(Error::Degenerate(format!(
            "tied order statistics at positions {} and {}",
            i + 1,
            i + 2
        ))),
        None => Ok(()),
    }
}

/// ln(1 − eˣ) for x < 0.
fn ln_one_minus_exp(x: f64) -> f64 {
    if x > -std::f64::consts::LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// ln(1 − U_{j:n}) − ln(1 − U_{j−1:n}), j = 1..r, with U_{0:n} = 0.
fn log_survival_spacings(u: &UniformOrderStats) -> Vec<f64> {
    let logs: Vec<f64> = match &u.ln_sf {
        Some(l) => l.clone(),
        None => u.values.iter().map(|&v| (-v).ln_1p()).collect(),
    };
    let mut prev = 0.0;
    logs.into_iter()
        .map(|cur| {
            let d = cur - prev;
            prev = cur;
            d
        })
        .collect()
}

/// u_{i:r} = (U_{i:n}/U_{r:n}) · B_{r,n−r+1}(U_{r:n})^{1/r}.
pub fn ms_transform(u: &UniformOrderStats) -> Result<UniformOrderStats> {
    let (n, r) = (u.source_n, u.r());
    let v = u.values();
    let ln_ur = v[r - 1].ln();
    let shift = ln_beta_tail_cdf(r, n, v[r - 1]) / r as f64 - ln_ur;
    let out = v.iter().map(|x| (x.ln() + shift).exp()).collect();
    Ok(UniformOrderStats::output(out, n))
}

/// u_{i:r} = 1 − Π_{j≤i} [(1 − U_{j:n})/(1 − U_{j−1:n})]^{(n−j+1)/(r−j+1)}.
pub fn os_transform(u: &UniformOrderStats) -> Result<UniformOrderStats> {
    let (n, r) = (u.source_n, u.r());
    no_ties(u.values())?;
    let mut acc = 0.0;
    let out = log_survival_spacings(u)
        .into_iter()
        .enumerate()
        .map(|(i, d)| {
            let j = i + 1;
            acc += d * (n - j + 1) as f64 / (r - j + 1) as f64;
            -acc.exp_m1()
        })
        .collect();
    Ok(UniformOrderStats::output(out, n))
}

/// uᵢ = [(1 − U_{i:n})/(1 − U_{i−1:n})]^{n−i+1}, then sorted.
pub fn lhb_transform(u: &UniformOrderStats) -> Result<UniformOrderStats> {
    let n = u.source_n;
    no_ties(u.values())?;
    let mut out: Vec<f64> = log_survival_spacings(u)
        .into_iter()
        .enumerate()
        .map(|(i, d)| (d * (n - i) as f64).exp())
        .collect();
    out.sort_by(f64::total_cmp);
    Ok(UniformOrderStats::output(out, n))
}

/// u_{i:r} = Π_{j=i}^{r} [1 − ((1 − U_{j:n})/(1 − U_{j−1:n}))^{n−j+1}]^{1/j}.
pub fn fk1_transform(u: &UniformOrderStats) -> Result<UniformOrderStats> {
    let (n, r) = (u.source_n, u.r());
    no_ties(u.values())?;
    let d = log_survival_spacings(u);
    let mut out = vec![0.0; r];
    let mut acc = 0.0;
    for i in (0..r).rev() {
        let j = i + 1;
        acc += ln_one_minus_exp(d[i] * (n - j + 1) as f64) / j as f64;
        out[i] = acc.exp();
    }
    Ok(UniformOrderStats::output(out, n))
}

/// u_{i:r} = 1 − [1 − B_{r,n−r+1}(U_{r:n})]^{1/r}
///             · Π_{j=2}^{i} [1 − (U_{r−j+1:n}/U_{r−j+2:n})^{r−j+1}]^{1/(r−j+1)};
/// the product is empty for i = 1.
pub fn fk2_transform(u: &UniformOrderStats) -> Result<UniformOrderStats> {
    let (n, r) = (u.source_n, u.r());
    let v = u.values();
    no_ties(v)?;
    let mut acc = ln_beta_tail_sf(r, n, v[r - 1]) / r as f64;
    let mut out = Vec::with_capacity(r);
    out.push(-acc.exp_m1());
    for j in 2..=r {
        let m = (r - j + 1) as f64;
        let ln_ratio = v[r - j].ln() - v[r - j + 1].ln();
        acc += ln_one_minus_exp(m * ln_ratio) / m;
        out.push(-acc.exp_m1());
    }
    Ok(UniformOrderStats::output(out, n))
}

/// Counters for the boundary policies applied along the pipeline.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Warnings {
    pub clamped: usize,
    pub ties: usize,
    pub repairs: usize,
}

impl Warnings {
    pub fn is_empty(&self) -> bool {
        self.clamped == 0 && self.ties == 0 && self.repairs == 0
    }

    pub fn merge(&mut self, other: Warnings) {
        self.clamped += other.clamped;
        self.ties += other.ties;
        self.repairs += other.repairs;
    }

    pub fn messages(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.clamped > 0 {
            out.push(format!(
                "{} probabilities clamped into [{CLAMP_EPS:e}, 1-{CLAMP_EPS:e}]",
                self.clamped
            ));
        }
        if self.ties > 0 {
            out.push(format!("{} tied fitted probabilities jittered", self.ties));
        }
        if self.repairs > 0 {
            out.push(format!("{} transformed values separated", self.repairs));
        }
        out
    }
}

fn clamp_unit(values: &mut [f64]) -> usize {
    let mut hits = 0;
    for v in values.iter_mut() {
        let c = v.clamp(CLAMP_EPS, 1.0 - CLAMP_EPS);
        if c != *v || v.is_nan() {
            hits += 1;
            *v = if v.is_nan() { 0.5 } else { c };
        }
    }
    hits
}

/// Forces strictly increasing values at least `gap` apart inside the clamp
/// range. Returns how many values were moved.
fn separate(values: &mut [f64], gap: f64) -> usize {
    let before = values.to_vec();
    for i in 1..values.len() {
        if values[i] < values[i - 1] + gap {
            values[i] = values[i - 1] + gap;
        }
    }
    let hi = 1.0 - CLAMP_EPS;
    if let Some(last) = values.last_mut() {
        *last = last.min(hi);
    }
    for i in (0..values.len().saturating_sub(1)).rev() {
        if values[i] > values[i + 1] - gap {
            values[i] = values[i + 1] - gap;
        }
    }
    values.iter().zip(&before).filter(|(a, b)| a != b).count()
}

/// Standardised normal scores with mean zero and sample variance one.
#[derive(Debug, Clone, PartialEq)]
pub struct ZScores {
    values: Vec<f64>,
}

impl ZScores {
    /// Standardises y by its mean and sample standard deviation (divisor r − 1).
    pub fn standardize(mut y: Vec<f64>) -> Result<Self> {
        let r = y.len();
        if r < 2 {
            return Err(Error::Shape(format!("need at least two scores, got {r}")));
        }
        let rf = r as f64;
        let mean = y.iter().sum::<f64>() / rf;
        let ss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
        let sd = (ss / (rf - 1.0)).sqrt();
        if !(sd > 0.0) || !sd.is_finite() {
            return Err(Error::DegenerateScale(format!("sample sd of normal scores is {sd}")));
        }
        for v in y.iter_mut() {
            *v = (*v - mean) / sd;
        }
        Ok(ZScores { values: y })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn r(&self) -> usize {
        self.values.len()
    }
}

/// Yⱼ = Φ⁻¹(uⱼ) standardised; values outside [ε, 1 − ε] are clamped.
pub fn chen_balakrishnan(u: &UniformOrderStats) -> Result<(ZScores, Warnings)> {
    let mut v = u.values().to_vec();
    let clamped = clamp_unit(&mut v);
    if clamped > 0 {
        log::warn!("{clamped} uniform values clamped before the normal quantile");
    }
    let z = ZScores::standardize(v.into_iter().map(norm_quantile).collect())?;
    Ok((
        z,
        Warnings {
            clamped,
            ..Warnings::default()
        },
    ))
}

/// Output of the full pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct Transformed {
    pub z: ZScores,
    pub estimate: Estimate,
    pub warnings: Warnings,
}

/// Fitted probabilities Ûⱼ = F(X_{j:n}; θ̂) of the observed values, clamped
/// and with ties separated.
pub fn fitted_uniforms(s: &CensoredSample, null_family: Family) -> Result<(UniformOrderStats, Estimate, Warnings)> {
    let est = estimate(null_family, s).map_err(|e| e.at("estimate"))?;
    let mut warnings = Warnings::default();
    let mut fitted: Vec<f64> = s.values().iter().map(|&x| est.spec.cdf(x)).collect();
    warnings.clamped += clamp_unit(&mut fitted);
    let ties = fitted.windows(2).filter(|w| w[1] <= w[0]).count();
    if ties > 0 {
        separate(&mut fitted, TIE_JITTER);
        warnings.ties += ties;
    }
    let mut u = UniformOrderStats::censored(fitted, s.n()).map_err(|e| e.at("fitted probabilities"))?;
    if warnings.is_empty() {
        u = u.with_log_survival(s.values().iter().map(|&x| est.spec.ln_sf(x)).collect());
    }
    Ok((u, est, warnings))
}

/// Transforms censored uniform order statistics to a complete sample and
/// maps it to standardised normal scores.
pub fn normal_scores(u: &UniformOrderStats, kind: TransformKind) -> Result<(ZScores, Warnings)> {
    let mut warnings = Warnings::default();
    let mut out = kind.apply(u).map_err(|e| e.at("transform"))?.into_values();
    warnings.clamped += clamp_unit(&mut out);
    warnings.repairs += separate(&mut out, STRICTNESS_GAP);
    let u = UniformOrderStats::output(out, u.source_n());
    let (z, w) = chen_balakrishnan(&u).map_err(|e| e.at("normal scores"))?;
    warnings.merge(w);
    Ok((z, warnings))
}

/// Estimate the null parameters, map the observations through the fitted
/// distribution function, transform to a complete uniform sample of size r
/// and normalise.
pub fn transformation7(s: &CensoredSample, null_family: Family, kind: TransformKind) -> Result<Transformed> {
    let (u, estimate, mut warnings) = fitted_uniforms(s, null_family)?;
    let (z, w) = normal_scores(&u, kind)?;
    warnings.merge(w);
    if !warnings.is_empty() {
        log::debug!("transformation warnings: {:?}", warnings);
    }
    Ok(Transformed { z, estimate, warnings })
}
