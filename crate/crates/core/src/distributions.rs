//! The parametric families used as null hypotheses and alternatives.
//!
//! Parameter conventions:
//!
//! | family            | parameters | meaning                                   |
//! |-------------------|------------|-------------------------------------------|
//! | `Exponential`     | σ          | scale, F(x) = 1 − e^{−x/σ}                 |
//! | `Gamma`           | θ, σ       | shape, scale                              |
//! | `Normal`          | μ, σ       | mean, standard deviation                  |
//! | `Weibull`         | α, β       | shape, scale                              |
//! | `InverseGaussian` | μ, λ       | mean, shape                               |
//! | `LogGamma`        | α, β       | X = e^G with G ~ gamma(shape α, rate β)   |
//! | `Logistic`        | α, β       | location, scale                           |
//! | `LogNormal`       | μ, σ       | log-mean, log-standard deviation          |
//! | `StudentT`        | m          | degrees of freedom                        |

use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma as GammaDist, StandardNormal};

use crate::error::{Error, Result};
use crate::roots::{invert_monotone, upper_bracket};
use crate::sample::CensoredSample;
use crate::special::{self, gamma_p, ln_gamma, ln_gamma_q, ln_norm_cdf, norm_cdf, norm_pdf, norm_quantile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Exponential,
    Gamma,
    Normal,
    Weibull,
    InverseGaussian,
    LogGamma,
    Logistic,
    LogNormal,
    StudentT,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::Exponential,
        Family::Gamma,
        Family::Normal,
        Family::Weibull,
        Family::InverseGaussian,
        Family::LogGamma,
        Family::Logistic,
        Family::LogNormal,
        Family::StudentT,
    ];

    pub fn arity(self) -> usize {
        match self {
            Family::Exponential | Family::StudentT => 1,
            _ => 2,
        }
    }

    /// Short lowercase name used in reports and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Family::Exponential => "exp",
            Family::Gamma => "gamma",
            Family::Normal => "normal",
            Family::Weibull => "weibull",
            Family::InverseGaussian => "ig",
            Family::LogGamma => "loggamma",
            Family::Logistic => "logistic",
            Family::LogNormal => "lognormal",
            Family::StudentT => "t",
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::Exponential => &["sigma"],
            Family::Gamma => &["theta", "sigma"],
            Family::Normal => &["mu", "sigma"],
            Family::Weibull => &["alpha", "beta"],
            Family::InverseGaussian => &["mu", "lambda"],
            Family::LogGamma => &["alpha", "beta"],
            Family::Logistic => &["alpha", "beta"],
            Family::LogNormal => &["mu", "sigma"],
            Family::StudentT => &["m"],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "exp" | "exponential" => Family::Exponential,
            "gamma" => Family::Gamma,
            "normal" | "norm" | "n" => Family::Normal,
            "weibull" | "wei" => Family::Weibull,
            "ig" | "invgauss" | "inversegaussian" | "inverse_gaussian" => Family::InverseGaussian,
            "loggamma" | "lgamma" | "log_gamma" => Family::LogGamma,
            "logistic" | "l" => Family::Logistic,
            "lognormal" | "ln" | "log_normal" => Family::LogNormal,
            "t" | "student" | "studentt" | "student_t" => Family::StudentT,
            other => return Err(Error::Parse(format!("unknown family `{other}`"))),
        })
    }
}

/// Family parameters in the order given by [`Family::param_names`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamVector {
    values: [f64; 2],
    len: usize,
}

impl ParamVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.values[..self.len]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.as_slice()[i]
    }
}

/// A family together with valid parameter values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilySpec {
    family: Family,
    params: ParamVector,
}

impl FamilySpec {
    pub fn new(family: Family, params: &[f64]) -> Result<Self> {
        let domain = |reason: String| Error::ParamDomain {
            family: family.name(),
            reason,
        };
        if params.len() != family.arity() {
            return Err(domain(format!(
                "expected {} parameter(s), got {}",
                family.arity(),
                params.len()
            )));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(domain("parameters must be finite".into()));
        }
        let positive: &[usize] = match family {
            Family::Exponential | Family::StudentT => &[0],
            Family::Normal | Family::Logistic | Family::LogNormal => &[1],
            _ => &[0, 1],
        };
        for &i in positive {
            if !(params[i] > 0.0) {
                return Err(domain(format!(
                    "{} must be positive, got {}",
                    family.param_names()[i],
                    params[i]
                )));
            }
        }
        let mut values = [0.0; 2];
        values[..params.len()].copy_from_slice(params);
        Ok(FamilySpec {
            family,
            params: ParamVector {
                values,
                len: params.len(),
            },
        })
    }

    pub fn exponential(sigma: f64) -> Result<Self> {
        Self::new(Family::Exponential, &[sigma])
    }
    pub fn gamma(theta: f64, sigma: f64) -> Result<Self> {
        Self::new(Family::Gamma, &[theta, sigma])
    }
    pub fn normal(mu: f64, sigma: f64) -> Result<Self> {
        Self::new(Family::Normal, &[mu, sigma])
    }
    pub fn weibull(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(Family::Weibull, &[alpha, beta])
    }
    pub fn inverse_gaussian(mu: f64, lambda: f64) -> Result<Self> {
        Self::new(Family::InverseGaussian, &[mu, lambda])
    }
    pub fn log_gamma(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(Family::LogGamma, &[alpha, beta])
    }
    pub fn logistic(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(Family::Logistic, &[alpha, beta])
    }
    pub fn log_normal(mu: f64, sigma: f64) -> Result<Self> {
        Self::new(Family::LogNormal, &[mu, sigma])
    }
    pub fn student_t(m: f64) -> Result<Self> {
        Self::new(Family::StudentT, &[m])
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &ParamVector {
        &self.params
    }

    fn p(&self, i: usize) -> f64 {
        self.params.values[i]
    }

    /// Lower end of the support.
    pub fn support_min(&self) -> f64 {
        match self.family {
            Family::Exponential | Family::Gamma | Family::Weibull | Family::InverseGaussian | Family::LogNormal => 0.0,
            // (log x)^{α−1} in the density needs log x > 0
            Family::LogGamma => 1.0,
            Family::Normal | Family::Logistic | Family::StudentT => f64::NEG_INFINITY,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x <= self.support_min() {
            return 0.0;
        }
        if x == f64::INFINITY {
            return 1.0;
        }
        match self.family {
            Family::Exponential => -(-x / self.p(0)).exp_m1(),
            Family::Gamma => gamma_p(self.p(0), x / self.p(1)),
            Family::Normal => norm_cdf((x - self.p(0)) / self.p(1)),
            Family::Weibull => -(-(x / self.p(1)).powf(self.p(0))).exp_m1(),
            Family::InverseGaussian => {
                let (mu, lambda) = (self.p(0), self.p(1));
                let s = (lambda / x).sqrt();
                let a = norm_cdf(s * (x / mu - 1.0));
                let b = (2.0 * lambda / mu + ln_norm_cdf(-s * (x / mu + 1.0))).exp();
                (a + b).min(1.0)
            }
            Family::LogGamma => gamma_p(self.p(0), self.p(1) * x.ln()),
            Family::Logistic => 1.0 / (1.0 + (-(x - self.p(0)) / self.p(1)).exp()),
            Family::LogNormal => norm_cdf((x.ln() - self.p(0)) / self.p(1)),
            Family::StudentT => student_t_cdf(self.p(0), x),
        }
    }

    /// ln(1 − F(x)), evaluated without forming 1 − F(x) where a tail
    /// formula exists.
    pub fn ln_sf(&self, x: f64) -> f64 {
        if x <= self.support_min() {
            return 0.0;
        }
        match self.family {
            Family::Exponential => -x / self.p(0),
            Family::Gamma => ln_gamma_q(self.p(0), x / self.p(1)),
            Family::Normal => ln_norm_cdf(-(x - self.p(0)) / self.p(1)),
            Family::Weibull => -(x / self.p(1)).powf(self.p(0)),
            Family::LogNormal => ln_norm_cdf(-(x.ln() - self.p(0)) / self.p(1)),
            _ => (-self.cdf(x)).ln_1p(),
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x <= self.support_min() || x.is_infinite() {
            return 0.0;
        }
        match self.family {
            Family::Exponential => (-x / self.p(0)).exp() / self.p(0),
            Family::Gamma => {
                let (theta, sigma) = (self.p(0), self.p(1));
                ((theta - 1.0) * x.ln() - x / sigma - theta * sigma.ln() - ln_gamma(theta)).exp()
            }
            Family::Normal => norm_pdf((x - self.p(0)) / self.p(1)) / self.p(1),
            Family::Weibull => {
                let (alpha, beta) = (self.p(0), self.p(1));
                let z = x / beta;
                alpha / beta * z.powf(alpha - 1.0) * (-z.powf(alpha)).exp()
            }
            Family::InverseGaussian => {
                let (mu, lambda) = (self.p(0), self.p(1));
                (lambda / (2.0 * std::f64::consts::PI * x.powi(3))).sqrt()
                    * (-lambda * (x - mu).powi(2) / (2.0 * mu * mu * x)).exp()
            }
            Family::LogGamma => {
                let (alpha, beta) = (self.p(0), self.p(1));
                (alpha * beta.ln() - ln_gamma(alpha) - (beta + 1.0) * x.ln() + (alpha - 1.0) * x.ln().ln()).exp()
            }
            Family::Logistic => {
                let (alpha, beta) = (self.p(0), self.p(1));
                // symmetric form avoids overflow of exp(-z) for very negative z
                let e = (-((x - alpha) / beta).abs()).exp();
                e / (beta * (1.0 + e).powi(2))
            }
            Family::LogNormal => norm_pdf((x.ln() - self.p(0)) / self.p(1)) / (self.p(1) * x),
            Family::StudentT => {
                let m = self.p(0);
                (ln_gamma(0.5 * (m + 1.0))
                    - ln_gamma(0.5 * m)
                    - 0.5 * (m * std::f64::consts::PI).ln()
                    - 0.5 * (m + 1.0) * (x * x / m).ln_1p())
                .exp()
            }
        }
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("quantile needs p in (0, 1), got {p}")));
        }
        Ok(match self.family {
            Family::Exponential => -self.p(0) * (-p).ln_1p(),
            Family::Gamma => self.p(1) * gamma_quantile(self.p(0), p),
            Family::Normal => self.p(0) + self.p(1) * norm_quantile(p),
            Family::Weibull => self.p(1) * (-(-p).ln_1p()).powf(1.0 / self.p(0)),
            Family::InverseGaussian => {
                let cdf = |x: f64| self.cdf(x);
                let pdf = |x: f64| self.density(x);
                let hi = upper_bracket(cdf, p, self.p(0));
                invert_monotone(cdf, pdf, p, 0.0, hi, self.p(0).min(hi))
            }
            Family::LogGamma => (gamma_quantile(self.p(0), p) / self.p(1)).exp(),
            Family::Logistic => self.p(0) + self.p(1) * (p / (1.0 - p)).ln(),
            Family::LogNormal => (self.p(0) + self.p(1) * norm_quantile(p)).exp(),
            Family::StudentT => {
                let cdf = |x: f64| self.cdf(x);
                let pdf = |x: f64| self.density(x);
                let x0 = norm_quantile(p);
                let hi = upper_bracket(cdf, p, 1.0);
                let lo = -upper_bracket(|x: f64| 1.0 - self.cdf(-x), 1.0 - p, 1.0);
                invert_monotone(cdf, pdf, p, lo, hi, x0)
            }
        })
    }

    /// One draw from the family.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.family {
            Family::Exponential => {
                let e: f64 = Exp1.sample(rng);
                self.p(0) * e
            }
            Family::Gamma => gamma_draw(self.p(0), self.p(1), rng),
            Family::Normal => {
                let z: f64 = StandardNormal.sample(rng);
                self.p(0) + self.p(1) * z
            }
            Family::Weibull => {
                let e: f64 = Exp1.sample(rng);
                self.p(1) * e.powf(1.0 / self.p(0))
            }
            Family::InverseGaussian => inverse_gaussian_draw(self.p(0), self.p(1), rng),
            // The log-gamma density β^α (log x)^{α−1} / (Γ(α) x^{β+1}) is the law
            // of e^G when G has the gamma density β^α g^{α−1} e^{−βg} / Γ(α):
            // substitute g = log x, dg = dx / x, and e^{−βg} = x^{−β}.
            Family::LogGamma => gamma_draw(self.p(0), 1.0 / self.p(1), rng).exp(),
            Family::Logistic => {
                let u: f64 = rng.sample(Open01);
                self.p(0) + self.p(1) * (u / (1.0 - u)).ln()
            }
            Family::LogNormal => {
                let z: f64 = StandardNormal.sample(rng);
                (self.p(0) + self.p(1) * z).exp()
            }
            Family::StudentT => {
                // Z / sqrt(V / m) with V ~ chi-square(m) = gamma(m/2, scale 2)
                let m = self.p(0);
                let z: f64 = StandardNormal.sample(rng);
                let v = gamma_draw(0.5 * m, 2.0, rng);
                z / (v / m).sqrt()
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Result<Vec<f64>> {
        if count == 0 {
            return Err(Error::Shape("sample count must be at least 1".into()));
        }
        Ok((0..count).map(|_| self.draw(rng)).collect())
    }

    /// The `r` smallest of `n` i.i.d. draws, ascending.
    pub fn sample_censored<R: Rng + ?Sized>(&self, n: usize, r: usize, rng: &mut R) -> Result<CensoredSample> {
        if r < 2 || r > n {
            return Err(Error::Shape(format!("need 2 ≤ r ≤ n, got r={r}, n={n}")));
        }
        CensoredSample::censor(self.sample(n, rng)?, r)
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.family.name())?;
        for (i, p) in self.params.as_slice().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    /// Parses `name(p1,p2)`, e.g. `gamma(4,1)` or `t(2)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let open = s
            .find('(')
            .ok_or_else(|| Error::Parse(format!("expected `family(params)`, got `{s}`")))?;
        if !s.ends_with(')') {
            return Err(Error::Parse(format!("missing `)` in `{s}`")));
        }
        let family: Family = s[..open].parse()?;
        let params = s[open + 1..s.len() - 1]
            .split([',', ';'])
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad parameter `{p}` in `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        FamilySpec::new(family, &params)
    }
}

fn student_t_cdf(m: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.5;
    }
    let tail = 0.5 * special::beta_reg(0.5 * m, 0.5, m / (m + x * x));
    if x > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

fn gamma_draw<R: Rng + ?Sized>(shape: f64, scale: f64, rng: &mut R) -> f64 {
    GammaDist::new(shape, scale)
        .expect("validated gamma parameters")
        .sample(rng)
}

/// Transformation with multiple roots: a chi-square(1) variate yields the
/// smaller root x₁ of the inverse Gaussian quadratic, and a uniform picks
/// x₁ with probability μ / (μ + x₁), otherwise μ² / x₁.
fn inverse_gaussian_draw<R: Rng + ?Sized>(mu: f64, lambda: f64, rng: &mut R) -> f64 {
    let nu: f64 = StandardNormal.sample(rng);
    let y = nu * nu;
    let my = mu * y;
    let x1 = mu + mu * my / (2.0 * lambda) - mu / (2.0 * lambda) * (4.0 * lambda * my + my * my).sqrt();
    let u: f64 = rng.random();
    if u <= mu / (mu + x1) {
        x1
    } else {
        mu * mu / x1
    }
}

/// Quantile of the standard gamma law with shape `theta` (unit scale).
///
/// Newton iteration on the distribution function inside a bisection
/// bracket, started from the Wilson–Hilferty cube-root approximation.
pub fn gamma_quantile(theta: f64, p: f64) -> f64 {
    let z = norm_quantile(p);
    let c = 1.0 / (9.0 * theta);
    let mut x0 = theta * (1.0 - c + z * c.sqrt()).powi(3);
    if !(x0 > 0.0) {
        // lower tail: P(θ, x) ≈ x^θ / Γ(θ + 1)
        x0 = ((p.ln() + ln_gamma(theta + 1.0)) / theta).exp();
    }
    let cdf = |x: f64| gamma_p(theta, x);
    let pdf = |x: f64| ((theta - 1.0) * x.ln() - x - ln_gamma(theta)).exp();
    let hi = upper_bracket(cdf, p, x0.max(theta) * 2.0);
    invert_monotone(cdf, pdf, p, 0.0, hi, x0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn all_specs() -> Vec<FamilySpec> {
        [
            "exp(1)",
            "exp(2.5)",
            "gamma(2,1)",
            "gamma(0.3,2)",
            "gamma(40,0.5)",
            "normal(0,1)",
            "normal(3,2)",
            "weibull(2,1)",
            "weibull(0.7,3)",
            "ig(4,1)",
            "ig(1,4)",
            "loggamma(2,1)",
            "loggamma(4,1)",
            "logistic(0,1)",
            "lognormal(0,1)",
            "t(2)",
            "t(4)",
            "t(0.8)",
        ]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect()
    }

    #[test]
    fn parameter_domain_errors() {
        assert!(FamilySpec::exponential(0.0).is_err());
        assert!(FamilySpec::gamma(-1.0, 1.0).is_err());
        assert!(FamilySpec::normal(0.0, -1.0).is_err());
        assert!(FamilySpec::new(Family::Weibull, &[1.0]).is_err());
        assert!(FamilySpec::student_t(f64::NAN).is_err());
        assert!(FamilySpec::normal(-5.0, 1.0).is_ok());
        assert!(matches!(
            FamilySpec::inverse_gaussian(1.0, 0.0),
            Err(Error::ParamDomain { .. })
        ));
    }

    #[test]
    fn parse_and_display() {
        let s: FamilySpec = "gamma(4,1)".parse().unwrap();
        assert_eq!(s, FamilySpec::gamma(4.0, 1.0).unwrap());
        assert_eq!(s.to_string(), "gamma(4,1)");
        assert!("gamma(4)".parse::<FamilySpec>().is_err());
        assert!("foo(1)".parse::<FamilySpec>().is_err());
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(FamilySpec::exponential(1.0).unwrap().cdf(0.0), 0.0);
        assert_eq!(FamilySpec::normal(0.0, 1.0).unwrap().cdf(0.0), 0.5);
        let g = FamilySpec::gamma(2.0, 1.0).unwrap().cdf(1.0);
        assert!((g - (1.0 - 2.0 * (-1.0f64).exp())).abs() < 1e-14);
        assert!((g - 0.264_241_117_657_115_4).abs() < 1e-14);
    }

    #[test]
    fn quantile_examples() {
        let e = FamilySpec::exponential(1.0).unwrap();
        assert!((e.quantile(1.0 - (-1.0f64).exp()).unwrap() - 1.0).abs() < 1e-14);
        let n = FamilySpec::normal(0.0, 1.0).unwrap();
        assert_eq!(n.quantile(0.5).unwrap(), 0.0);
        assert!((n.quantile(0.975).unwrap() - 1.959_963_984_540_054).abs() < 1e-12);
        assert!(n.quantile(0.0).is_err());
        assert!(n.quantile(1.0).is_err());
    }

    #[test]
    fn density_examples() {
        let l = FamilySpec::logistic(0.0, 1.0).unwrap();
        assert!((l.density(0.0) - 0.25).abs() < 1e-15);
        let inv_sqrt_2pi = 1.0 / special::SQRT_2PI;
        let ln = FamilySpec::log_normal(0.0, 1.0).unwrap();
        assert!((ln.density(1.0) - inv_sqrt_2pi).abs() < 1e-15);
        let ig = FamilySpec::inverse_gaussian(1.0, 1.0).unwrap();
        assert!((ig.density(1.0) - inv_sqrt_2pi).abs() < 1e-15);
    }

    #[test]
    fn quantile_inverts_cdf_on_grid() {
        for spec in all_specs() {
            let tol = match spec.family() {
                Family::Gamma | Family::InverseGaussian | Family::LogGamma => 1e-7,
                _ => 1e-9,
            };
            for i in 1..1000 {
                let p = i as f64 / 1000.0;
                let x = spec.quantile(p).unwrap();
                let back = spec.cdf(x);
                assert!((back - p).abs() < tol, "{spec}: p={p} x={x} cdf={back}");
            }
        }
    }

    #[test]
    fn cdf_is_monotone_with_limits() {
        for spec in all_specs() {
            let lo = spec.quantile(1e-6).unwrap();
            let hi = spec.quantile(1.0 - 1e-6).unwrap();
            let mut prev = spec.cdf(lo - (hi - lo));
            for i in 0..=500 {
                let x = lo + (hi - lo) * i as f64 / 500.0;
                let c = spec.cdf(x);
                assert!((0.0..=1.0).contains(&c));
                assert!(c >= prev, "{spec} not monotone at {x}");
                prev = c;
            }
            assert_eq!(spec.cdf(f64::INFINITY), 1.0);
            assert_eq!(spec.cdf(f64::NEG_INFINITY), 0.0);
        }
    }

    #[test]
    fn density_matches_cdf_derivative() {
        for spec in all_specs() {
            for i in 1..=100 {
                let p = 0.01 + 0.98 * (i as f64 - 0.5) / 100.0;
                let x = spec.quantile(p).unwrap();
                let iqr = spec.quantile(0.75).unwrap() - spec.quantile(0.25).unwrap();
                let h = if spec.support_min().is_finite() {
                    1e-4 * (x - spec.support_min())
                } else {
                    1e-4 * x.abs().max(iqr)
                };
                let fd = (spec.cdf(x + h) - spec.cdf(x - h)) / (2.0 * h);
                let d = spec.density(x);
                assert!(((fd - d) / d).abs() < 1e-5, "{spec}: x={x} fd={fd} density={d}");
            }
        }
    }

    #[test]
    fn densities_integrate_to_one() {
        for spec in all_specs() {
            // integrate in probability space over the central mass plus tails
            let a = spec.quantile(1e-9).unwrap();
            let b = spec.quantile(1.0 - 1e-9).unwrap();
            let r = crate::quad::integrate(|x| spec.density(x), a, b, 1e-12, 1e-10);
            assert!((r.value - (1.0 - 2e-9)).abs() < 1e-7, "{spec}: {}", r.value);
        }
    }

    #[test]
    fn exponential_mean_within_clt_band() {
        let mut rng = stream(1, "test", 0);
        let xs = FamilySpec::exponential(1.0).unwrap().sample(100_000, &mut rng).unwrap();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean - 1.0).abs() < 3.0 / (1e5f64).sqrt());
    }

    #[test]
    fn log_gamma_support_above_one() {
        let mut rng = stream(2, "test", 0);
        let spec = FamilySpec::log_gamma(2.0, 1.0).unwrap();
        assert!(spec.sample(100_000, &mut rng).unwrap().iter().all(|&x| x > 1.0));
    }

    #[test]
    fn student_t_median_near_zero() {
        let mut rng = stream(3, "test", 0);
        let mut xs = FamilySpec::student_t(2.0).unwrap().sample(100_000, &mut rng).unwrap();
        xs.sort_by(f64::total_cmp);
        let med = xs[50_000];
        // sd of the sample median: 1 / (2 f(0) sqrt(n)), f(0) = 1/(2√2) for t₂
        let sd = 1.0 / (2.0 * (1.0 / 8f64.sqrt()) * 1e5f64.sqrt());
        assert!(med.abs() < 3.0 * sd);
    }

    #[test]
    fn censored_full_equals_sorted_sample() {
        let spec = FamilySpec::weibull(2.0, 1.0).unwrap();
        let full = spec.sample_censored(30, 30, &mut stream(9, "t", 0)).unwrap();
        let mut raw = spec.sample(30, &mut stream(9, "t", 0)).unwrap();
        raw.sort_by(f64::total_cmp);
        assert_eq!(full.values(), raw.as_slice());
        assert!(spec.sample_censored(10, 1, &mut stream(9, "t", 0)).is_err());
        assert!(spec.sample_censored(10, 11, &mut stream(9, "t", 0)).is_err());
    }
}
