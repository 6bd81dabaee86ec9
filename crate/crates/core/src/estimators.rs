//! Parameter estimation from Type-II censored samples for the three null
//! families: exponential (closed-form MLE), gamma (censored MLE) and normal
//! (Gupta's linear estimator with plotting-position scores).

use crate::distributions::{Family, FamilySpec};
use crate::error::{Error, Result};
use crate::roots::brent;
use crate::sample::CensoredSample;
use crate::special::{digamma, dln_j_dx, ln_j_integral, norm_quantile};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub spec: FamilySpec,
    pub diagnostics: Diagnostics,
}

impl Estimate {
    pub fn family(&self) -> Family {
        self.spec.family()
    }

    pub fn params(&self) -> &[f64] {
        self.spec.params().as_slice()
    }

    fn exact(spec: FamilySpec) -> Self {
        Estimate {
            spec,
            diagnostics: Diagnostics {
                iterations: 0,
                residual: 0.0,
                converged: true,
            },
        }
    }
}

/// Families with a censored-sample estimator.
pub const NULL_FAMILIES: [Family; 3] = [Family::Exponential, Family::Gamma, Family::Normal];

pub fn estimate(family: Family, s: &CensoredSample) -> Result<Estimate> {
    match family {
        Family::Exponential => estimate_exponential(s),
        Family::Gamma => estimate_gamma(s),
        Family::Normal => estimate_normal_gupta(s),
        other => Err(Error::UnsupportedNull(other.name().into())),
    }
}

fn require_positive(s: &CensoredSample) -> Result<()> {
    match s.values().first() {
        Some(&x) if x > 0.0 => Ok(()),
        Some(&x) => Err(Error::Domain(format!("observations must be positive, got {x}"))),
        None => unreachable!("CensoredSample has r ≥ 2"),
    }
}

/// σ̂ = (Σ_{j≤r} X_{j:n} + (n − r) X_{r:n}) / r.
pub fn estimate_exponential(s: &CensoredSample) -> Result<Estimate> {
    require_positive(s)?;
    let r = s.r() as f64;
    let total: f64 = s.values().iter().sum::<f64>() + (s.n() - s.r()) as f64 * s.last();
    Ok(Estimate::exact(FamilySpec::exponential(total / r)?))
}

/// Summary quantities of a censored sample used by the gamma likelihood
/// equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaSummary {
    /// Geometric mean over X_{r:n}.
    pub p_r: f64,
    /// Arithmetic mean over X_{r:n}.
    pub s_r: f64,
    pub x_r: f64,
    pub n: usize,
    pub r: usize,
}

impl GammaSummary {
    pub fn new(s: &CensoredSample) -> Result<Self> {
        require_positive(s)?;
        let r = s.r() as f64;
        let x_r = s.last();
        let mean_log = s.values().iter().map(|x| x.ln()).sum::<f64>() / r;
        let mean = s.values().iter().sum::<f64>() / r;
        Ok(GammaSummary {
            p_r: mean_log.exp() / x_r,
            s_r: mean / x_r,
            x_r,
            n: s.n(),
            r: s.r(),
        })
    }

    /// Residuals of the two likelihood equations at (θ, σ), each divided by
    /// its leading count (n for the first, r for the second).
    pub fn residuals(&self, theta: f64, sigma: f64) -> (f64, f64) {
        let (n, r) = (self.n as f64, self.r as f64);
        let k = n - r;
        let y = self.x_r / sigma;
        let (censored_shape, censored_scale) = if self.n > self.r {
            (dln_j_dx(theta, y), (-y - ln_j_integral(theta, y)).exp())
        } else {
            (0.0, 0.0)
        };
        let first = (r * self.p_r.ln() - n * (digamma(theta) - y.ln()) + k * censored_shape) / n;
        let second = y * self.s_r - theta + k * censored_scale / r;
        (first, second)
    }
}

// Search bracket for the shape parameter.
const THETA_MIN: f64 = 0.05;
const THETA_MAX: f64 = 500.0;
const GAMMA_TOL: f64 = 1e-8;

/// Solves the second likelihood equation for y = X_{r:n}/σ at fixed θ:
///   S_r·y − θ + ((n − r)/r)·e^{−y}/J(θ, y) = 0,
/// which is increasing in y, negative as y → 0 and positive at y = θ/S_r.
fn solve_scale_ratio(g: &GammaSummary, theta: f64) -> Result<(f64, usize)> {
    let y_full = theta / g.s_r;
    if g.n == g.r {
        return Ok((y_full, 0));
    }
    let ratio = (g.n - g.r) as f64 / g.r as f64;
    let f = |y: f64| y * g.s_r - theta + ratio * (-y - ln_j_integral(theta, y)).exp();
    let root = brent(f, y_full * 1e-12, y_full, 1e-15 * y_full, 200)?;
    Ok((root.x, root.iterations))
}

/// Censored gamma MLE: the second equation gives σ̂(θ) by a bracketed
/// one-dimensional solve; the first equation is then solved for θ̂ on
/// [0.05, 500] with σ̂(θ) substituted.
pub fn estimate_gamma(s: &CensoredSample) -> Result<Estimate> {
    let g = GammaSummary::new(s)?;
    if s.values().first() == Some(&s.last()) {
        return Err(Error::DegenerateScale("all observations are equal".into()));
    }
    if s.r() < 3 {
        return Err(Error::Shape(format!("gamma estimation needs r ≥ 3, got r={}", s.r())));
    }
    let (n, r) = (g.n as f64, g.r as f64);
    let k = n - r;
    let mut inner_iterations = 0usize;
    let mut shape_equation = |theta: f64| -> f64 {
        match solve_scale_ratio(&g, theta) {
            Ok((y, it)) => {
                inner_iterations += it;
                let censored = if g.n > g.r { dln_j_dx(theta, y) } else { 0.0 };
                (r * g.p_r.ln() - n * (digamma(theta) - y.ln()) + k * censored) / n
            }
            Err(_) => f64::NAN,
        }
    };

    // Bracket outward from the moment estimate of the observed values.
    let start = moment_shape(s.values()).clamp(THETA_MIN, THETA_MAX);
    let f_start = shape_equation(start);
    let (mut lo, mut hi) = (start, start);
    let (mut f_lo, mut f_hi) = (f_start, f_start);
    let mut bracketed = false;
    for _ in 0..60 {
        if f_lo.signum() != f_hi.signum() {
            bracketed = true;
            break;
        }
        if lo > THETA_MIN {
            lo = (lo / 2.0).max(THETA_MIN);
            f_lo = shape_equation(lo);
            if f_lo.signum() != f_start.signum() {
                hi = (lo * 2.0).min(start);
                f_hi = shape_equation(hi);
                continue;
            }
        }
        if hi < THETA_MAX {
            hi = (hi * 2.0).min(THETA_MAX);
            f_hi = shape_equation(hi);
            if f_hi.signum() != f_start.signum() {
                lo = (hi / 2.0).max(start);
                f_lo = shape_equation(lo);
                continue;
            }
        }
        if lo <= THETA_MIN && hi >= THETA_MAX {
            break;
        }
    }
    if !bracketed || f_lo.is_nan() || f_hi.is_nan() {
        let (best, fb) = if f_lo.abs() < f_hi.abs() {
            (lo, f_lo)
        } else {
            (hi, f_hi)
        };
        let sigma = solve_scale_ratio(&g, best).map(|(y, _)| g.x_r / y).unwrap_or(f64::NAN);
        return Err(Error::Convergence {
            iterations: inner_iterations,
            best: vec![best, sigma],
            residual: fb.abs(),
        });
    }
    let root = brent(&mut shape_equation, lo, hi, 1e-13, 200)?;
    let theta = root.x;
    let (y, _) = solve_scale_ratio(&g, theta)?;
    let sigma = g.x_r / y;
    let (e1, e2) = g.residuals(theta, sigma);
    let residual = e1.abs().max(e2.abs());
    let diagnostics = Diagnostics {
        iterations: root.iterations,
        residual,
        converged: residual <= GAMMA_TOL,
    };
    if !diagnostics.converged {
        return Err(Error::Convergence {
            iterations: root.iterations,
            best: vec![theta, sigma],
            residual,
        });
    }
    Ok(Estimate {
        spec: FamilySpec::gamma(theta, sigma)?,
        diagnostics,
    })
}

fn moment_shape(values: &[f64]) -> f64 {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    if var > 0.0 {
        mean * mean / var
    } else {
        1.0
    }
}

/// Gupta's linear coefficients (b_j, c_j), j = 1..r, built from the
/// plotting-position scores m_j = Φ⁻¹((j − 0.375)/(n + 0.125)).
pub fn gupta_coefficients(n: usize, r: usize) -> (Vec<f64>, Vec<f64>) {
    let m: Vec<f64> = (1..=r)
        .map(|j| norm_quantile((j as f64 - 0.375) / (n as f64 + 0.125)))
        .collect();
    let rf = r as f64;
    let m_bar = m.iter().sum::<f64>() / rf;
    let ss: f64 = m.iter().map(|mj| (mj - m_bar).powi(2)).sum();
    let c: Vec<f64> = m.iter().map(|mj| (mj - m_bar) / ss).collect();
    let b: Vec<f64> = c.iter().map(|cj| 1.0 / rf - m_bar * cj).collect();
    (b, c)
}

/// μ̂ = Σ b_j X_{j:n}, σ̂ = Σ c_j X_{j:n}.
pub fn estimate_normal_gupta(s: &CensoredSample) -> Result<Estimate> {
    if s.values().first() == Some(&s.last()) {
        return Err(Error::DegenerateScale("all observations are equal".into()));
    }
    let (b, c) = gupta_coefficients(s.n(), s.r());
    let mu: f64 = b.iter().zip(s.values()).map(|(w, x)| w * x).sum();
    let sigma: f64 = c.iter().zip(s.values()).map(|(w, x)| w * x).sum();
    if !(sigma > 0.0) {
        return Err(Error::DegenerateScale(format!(
            "scale estimate {sigma} is not positive"
        )));
    }
    Ok(Estimate::exact(FamilySpec::normal(mu, sigma)?))
}
