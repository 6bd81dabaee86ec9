//! Simulation of the empirical process behind the normal-score
//! transformation, its three-part decomposition, and the linear
//! approximations of the third part, for the exponential family.

use std::path::Path;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::distributions::{Family, FamilySpec};
use crate::error::{Error, Result};
use crate::rng::stream;
use crate::special::{norm_cdf, norm_pdf, norm_quantile};

pub const PROCESS_NAMES: [&str; 6] = [
    "beta_n",
    "beta_n1",
    "beta_n2",
    "beta_n3",
    "ring_beta_n3",
    "tilde_beta_n3",
];

pub const CURVES_HEADER: &str = "process,t,mean,sd,n,B,seed";

const BLOCK: usize = 250;

/// Equidistant evaluation points on [δ, 1 − δ].
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessGrid {
    ts: Vec<f64>,
}

impl ProcessGrid {
    pub fn new(delta: f64, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0) || !(delta > 0.0 && delta < 0.5) {
            return Err(Error::Domain(format!(
                "grid needs spacing > 0 and δ in (0, 0.5), got spacing={spacing}, δ={delta}"
            )));
        }
        let count = ((1.0 - 2.0 * delta) / spacing + 1e-9).floor() as usize + 1;
        let ts = (0..count)
            .map(|k| ((delta + k as f64 * spacing) * 1e12).round() / 1e12)
            .collect();
        Ok(ProcessGrid { ts })
    }

    pub fn from_points(mut ts: Vec<f64>) -> Result<Self> {
        ts.sort_by(f64::total_cmp);
        if ts.is_empty() || ts.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
            return Err(Error::Domain("grid points must lie in (0, 1)".into()));
        }
        Ok(ProcessGrid { ts })
    }

    pub fn points(&self) -> &[f64] {
        &self.ts
    }

    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }
}

impl Default for ProcessGrid {
    fn default() -> Self {
        ProcessGrid::new(0.005, 0.005).expect("valid default grid")
    }
}

/// C(s,t) = min(s,t) − st − φ(Φ⁻¹(s))φ(Φ⁻¹(t)) − ½Φ⁻¹(s)φ(Φ⁻¹(s))Φ⁻¹(t)φ(Φ⁻¹(t)).
pub fn durbin_covariance(s: f64, t: f64) -> Result<f64> {
    for p in [s, t] {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("covariance needs arguments in (0, 1), got {p}")));
        }
    }
    let (s, t) = if s <= t { (s, t) } else { (t, s) };
    let (qs, qt) = (norm_quantile(s), norm_quantile(t));
    let (ps, pt) = (norm_pdf(qs), norm_pdf(qt));
    Ok(s.min(t) - s * t - ps * pt - 0.5 * qs * ps * qt * pt)
}

/// Per-replication summary quantities entering the first-order term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaState {
    pub n_bar: f64,
    pub s_n: f64,
    pub w_bar: f64,
    pub s_w: f64,
    /// Sample correlation of W and N.
    pub r: f64,
}

/// dNⱼ/dσ for Nⱼ(σ) = Φ⁻¹(1 − e^{−Xⱼ/σ}).
pub fn exponential_w(x: f64, sigma: f64) -> f64 {
    let e = (-x / sigma).exp();
    let nj = norm_quantile(-(-x / sigma).exp_m1());
    -(x / (sigma * sigma)) * e / norm_pdf(nj)
}

fn exponential_scale(family: &FamilySpec) -> Result<f64> {
    match family.family() {
        Family::Exponential => Ok(family.params().get(0)),
        other => Err(Error::UnsupportedNull(format!(
            "the process decomposition is implemented for exp, not {}",
            other.name()
        ))),
    }
}

/// For the exponential scale family,
///   g′ₜ(σ₀) = h′ₜ(σ₀) − (1 − p) ln(1 − p)/σ₀,   p = c_N(t),
/// with h′ₜ(σ₀) = φ(N̄ + s_N Φ⁻¹(t)) (W̄ + Φ⁻¹(t) r s_W).
pub fn lemma1_g_prime(t: f64, state: &LemmaState, family: &FamilySpec) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!("t must lie in (0, 1), got {t}")));
    }
    let sigma0 = exponential_scale(family)?;
    let q = norm_quantile(t);
    let arg = state.n_bar + state.s_n * q;
    let p = norm_cdf(arg);
    let h = norm_pdf(arg) * (state.w_bar + q * state.r * state.s_w);
    Ok(h - (1.0 - p) * (-p).ln_1p() / sigma0)
}

/// Limits of W̄, s_W and the correlation of W with N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationConstants {
    pub mu_w: f64,
    pub sigma_w: f64,
    pub rho: f64,
    pub draws: usize,
    pub seed: u64,
}

pub const POPULATION_DRAWS: usize = 1_000_000;
pub const POPULATION_SEED: u64 = 20_130_101;

impl PopulationConstants {
    /// Monte Carlo estimate for Exp(σ₀). W scales as 1/σ₀ and ρ is scale
    /// free, so the unit-scale constants are computed once and rescaled.
    pub fn exponential(sigma0: f64) -> Self {
        static UNIT: OnceLock<PopulationConstants> = OnceLock::new();
        let unit = *UNIT.get_or_init(|| Self::simulate_unit(POPULATION_DRAWS, POPULATION_SEED));
        PopulationConstants {
            mu_w: unit.mu_w / sigma0,
            sigma_w: unit.sigma_w / sigma0,
            ..unit
        }
    }

    pub fn simulate_unit(draws: usize, seed: u64) -> Self {
        let spec = FamilySpec::exponential(1.0).expect("unit exponential");
        let blocks: Vec<[f64; 5]> = (0..draws.div_ceil(BLOCK * 40))
            .into_par_iter()
            .map(|b| {
                let mut rng = stream(seed, "population", b as u64);
                let mut acc = [0.0; 5];
                let len = (BLOCK * 40).min(draws - b * BLOCK * 40);
                for _ in 0..len {
                    let x = spec.draw(&mut rng);
                    let w = exponential_w(x, 1.0);
                    let nj = norm_quantile(-(-x).exp_m1());
                    acc[0] += w;
                    acc[1] += w * w;
                    acc[2] += nj;
                    acc[3] += nj * nj;
                    acc[4] += w * nj;
                }
                acc
            })
            .collect();
        let mut s = [0.0; 5];
        for b in &blocks {
            for k in 0..5 {
                s[k] += b[k];
            }
        }
        let m = draws as f64;
        let mu_w = s[0] / m;
        let var_w = s[1] / m - mu_w * mu_w;
        let mu_n = s[2] / m;
        let var_n = s[3] / m - mu_n * mu_n;
        let cov = s[4] / m - mu_w * mu_n;
        PopulationConstants {
            mu_w,
            sigma_w: var_w.sqrt(),
            rho: cov / (var_w * var_n).sqrt(),
            draws,
            seed,
        }
    }
}

/// g̃′ₜ(σ₀) = h̃′ₜ − (1 − t) ln(1 − t)/σ₀ with h̃′ₜ = φ(Φ⁻¹(t))(μ_W + Φ⁻¹(t) ρ σ_W).
pub fn lemma2_g_prime(t: f64, pc: &PopulationConstants, family: &FamilySpec) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!("t must lie in (0, 1), got {t}")));
    }
    if !(pc.sigma_w > 0.0) {
        return Err(Error::Domain(format!("σ_W must be positive, got {}", pc.sigma_w)));
    }
    let sigma0 = exponential_scale(family)?;
    let q = norm_quantile(t);
    let h = norm_pdf(q) * (pc.mu_w + q * pc.rho * pc.sigma_w);
    Ok(h - (1.0 - t) * (-t).ln_1p() / sigma0)
}

/// β̃ₙ,₃(t) = √n(σ̂ − σ₀) · g̃′ₜ(σ₀).
pub fn lemma2_tilde_beta(
    t: f64,
    sqrt_n_times_estimator_error: f64,
    pc: &PopulationConstants,
    family: &FamilySpec,
) -> Result<f64> {
    Ok(sqrt_n_times_estimator_error * lemma2_g_prime(t, pc, family)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProcessOptions {
    pub grid: ProcessGrid,
    /// Replace Nⱼ by standard normals independent of the data.
    pub independent_normals: bool,
    /// Grid pairs at which the covariance of β̂ₙ,₂ is estimated.
    pub covariance_pairs: Vec<(f64, f64)>,
    pub threads: Option<usize>,
}

impl Default for ProcessOptions {
    fn default() -> Self {
        ProcessOptions {
            grid: ProcessGrid::default(),
            independent_normals: false,
            covariance_pairs: vec![(0.25, 0.25), (0.25, 0.75), (0.5, 0.5)],
            threads: None,
        }
    }
}

/// Mean and sample standard deviation of each process over the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessCurves {
    pub t: Vec<f64>,
    /// Indexed like [`PROCESS_NAMES`].
    pub mean: Vec<Vec<f64>>,
    pub sd: Vec<Vec<f64>>,
    pub n: usize,
    pub replications: usize,
    pub family: FamilySpec,
    pub seed: u64,
    pub independent_normals: bool,
    /// Largest |β̂ₙ − (β̂ₙ,₁ + β̂ₙ,₂ + β̂ₙ,₃)| seen over all replications and t.
    pub identity_error: f64,
    /// ((s, t), sample covariance of β̂ₙ,₂(s) and β̂ₙ,₂(t)).
    pub covariances: Vec<((f64, f64), f64)>,
    pub constants: PopulationConstants,
}

impl ProcessCurves {
    pub fn index(name: &str) -> Option<usize> {
        PROCESS_NAMES.iter().position(|p| *p == name)
    }

    pub fn mean_of(&self, name: &str) -> &[f64] {
        &self.mean[Self::index(name).expect("known process")]
    }

    pub fn sd_of(&self, name: &str) -> &[f64] {
        &self.sd[Self::index(name).expect("known process")]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# family = {}\n", self.family));
        out.push_str(&format!("# independent_normals = {}\n", self.independent_normals));
        out.push_str(&format!("# identity_error = {:e}\n", self.identity_error));
        out.push_str(&format!(
            "# population mu_w = {}, sigma_w = {}, rho = {} ({} draws, seed {})\n",
            self.constants.mu_w, self.constants.sigma_w, self.constants.rho, self.constants.draws, self.constants.seed
        ));
        out.push_str(CURVES_HEADER);
        out.push('\n');
        for (p, name) in PROCESS_NAMES.iter().enumerate() {
            for (k, t) in self.t.iter().enumerate() {
                out.push_str(&format!(
                    "{name},{t},{},{},{},{},{}\n",
                    self.mean[p][k], self.sd[p][k], self.n, self.replications, self.seed
                ));
            }
        }
        out
    }
}

/// One row of the curves CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub process: String,
    pub t: f64,
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
    pub replications: usize,
    pub seed: u64,
}

pub fn parse_curves(text: &str) -> Result<Vec<CurveRow>> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    if lines.next().map(str::trim) != Some(CURVES_HEADER) {
        return Err(Error::Parse(format!("expected header `{CURVES_HEADER}`")));
    }
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            let bad = || Error::Parse(format!("bad curves row `{line}`"));
            if f.len() != 7 {
                return Err(bad());
            }
            Ok(CurveRow {
                process: f[0].to_string(),
                t: f[1].parse().map_err(|_| bad())?,
                mean: f[2].parse().map_err(|_| bad())?,
                sd: f[3].parse().map_err(|_| bad())?,
                n: f[4].parse().map_err(|_| bad())?,
                replications: f[5].parse().map_err(|_| bad())?,
                seed: f[6].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

pub fn emit_curves(curves: &ProcessCurves, comments: &[String], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    for c in comments {
        out.push_str(&format!("# {c}\n"));
    }
    out.push_str(&curves.to_csv());
    std::fs::write(path, out)?;
    Ok(())
}

/// Running means and co-moments, merged pairwise.
#[derive(Debug, Clone)]
struct Moments {
    count: f64,
    mean: Vec<f64>,
    m2: Vec<f64>,
    // co-moments for the covariance pairs: (index a, index b) into `mean`
    pairs: Vec<(usize, usize)>,
    c2: Vec<f64>,
    identity_error: f64,
}

impl Moments {
    fn new(dim: usize, pairs: Vec<(usize, usize)>) -> Self {
        let np = pairs.len();
        Moments {
            count: 0.0,
            mean: vec![0.0; dim],
            m2: vec![0.0; dim],
            pairs,
            c2: vec![0.0; np],
            identity_error: 0.0,
        }
    }

    fn push(&mut self, x: &[f64]) {
        self.count += 1.0;
        let mut delta = vec![0.0; x.len()];
        for (k, &v) in x.iter().enumerate() {
            delta[k] = v - self.mean[k];
            self.mean[k] += delta[k] / self.count;
        }
        for (k, &v) in x.iter().enumerate() {
            self.m2[k] += delta[k] * (v - self.mean[k]);
        }
        for (i, &(a, b)) in self.pairs.iter().enumerate() {
            self.c2[i] += delta[a] * (x[b] - self.mean[b]);
        }
    }

    fn merge(&mut self, o: &Moments) {
        if o.count == 0.0 {
            return;
        }
        let (na, nb) = (self.count, o.count);
        let n = na + nb;
        let delta: Vec<f64> = o.mean.iter().zip(&self.mean).map(|(b, a)| b - a).collect();
        for (k, d) in delta.iter().enumerate() {
            self.m2[k] += o.m2[k] + d * d * na * nb / n;
            self.mean[k] += d * nb / n;
        }
        for (i, &(a, b)) in self.pairs.iter().enumerate() {
            self.c2[i] += o.c2[i] + delta[a] * delta[b] * na * nb / n;
        }
        self.count = n;
        self.identity_error = self.identity_error.max(o.identity_error);
    }
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let m = v.len() as f64;
    let mean = v.iter().sum::<f64>() / m;
    let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt();
    (mean, sd)
}

fn count_le(sorted: &[f64], c: f64) -> f64 {
    sorted.partition_point(|&v| v <= c) as f64
}

/// All six processes of one replication at the grid points, followed by
/// β̂ₙ,₂ at the extra points. Returns the values and the identity error.
fn replication(
    x: &[f64],
    sigma0: f64,
    ts: &[f64],
    extra: &[f64],
    normals: Option<&[f64]>,
    pc: &PopulationConstants,
    family: &FamilySpec,
) -> (Vec<f64>, f64) {
    let n = x.len();
    let nf = n as f64;
    let rn = nf.sqrt();
    let sigma_hat = x.iter().sum::<f64>() / nf;

    let u: Vec<f64> = x.iter().map(|&v| -(-v / sigma0).exp_m1()).collect();
    let nn: Vec<f64> = u.iter().map(|&p| norm_quantile(p)).collect();
    let y: Vec<f64> = x.iter().map(|&v| norm_quantile(-(-v / sigma_hat).exp_m1())).collect();
    let w: Vec<f64> = x.iter().map(|&v| exponential_w(v, sigma0)).collect();

    let (y_bar, s_y) = mean_sd(&y);
    let (n_bar, s_n) = mean_sd(&nn);
    let (w_bar, s_w) = mean_sd(&w);
    let r = nn.iter().zip(&w).map(|(a, b)| (a - n_bar) * (b - w_bar)).sum::<f64>() / ((nf - 1.0) * s_n * s_w);
    let state = LemmaState {
        n_bar,
        s_n,
        w_bar,
        s_w,
        r,
    };

    // The normal scores coupled to the indicators: Nⱼ itself, or independent
    // normals with Ũⱼ = Φ(Ñⱼ).
    let (cn_bar, cs_n, mut u_c) = match normals {
        None => (n_bar, s_n, u.clone()),
        Some(z) => {
            let (m, s) = mean_sd(z);
            (m, s, z.iter().map(|&v| norm_cdf(v)).collect())
        }
    };
    let mut u_sorted = u.clone();
    u_sorted.sort_by(f64::total_cmp);
    u_c.sort_by(f64::total_cmp);
    let mut pz: Vec<f64> = y.iter().map(|&v| norm_cdf((v - y_bar) / s_y)).collect();
    pz.sort_by(f64::total_cmp);

    let est_err = rn * (sigma_hat - sigma0);
    let g = ts.len();
    let mut out = vec![0.0; 6 * g + extra.len()];
    let mut identity = 0.0f64;
    for (k, &t) in ts.iter().enumerate() {
        let q = norm_quantile(t);
        let c_y = norm_cdf(y_bar + s_y * q);
        let c_n = norm_cdf(cn_bar + cs_n * q);
        // a(t) = F_{σ₀}(F_{σ̂}⁻¹(c_Y(t)))
        let a = -((sigma_hat / sigma0) * (-c_y).ln_1p()).exp_m1();
        let beta = (count_le(&pz, t) - nf * t) / rn;
        let b1 = (count_le(&u_sorted, a) - nf * a - count_le(&u_c, c_n) + nf * c_n) / rn;
        let b2 = (count_le(&u_c, c_n) - nf * t) / rn;
        let b3 = rn * (a - c_n);
        let ring = est_err * lemma1_g_prime(t, &state, family).expect("interior t");
        let tilde = lemma2_tilde_beta(t, est_err, pc, family).expect("interior t");
        identity = identity.max((beta - (b1 + b2 + b3)).abs());
        for (p, v) in [beta, b1, b2, b3, ring, tilde].into_iter().enumerate() {
            out[p * g + k] = v;
        }
    }
    for (k, &t) in extra.iter().enumerate() {
        let c_n = norm_cdf(cn_bar + cs_n * norm_quantile(t));
        out[6 * g + k] = (count_le(&u_c, c_n) - nf * t) / rn;
    }
    (out, identity)
}

/// Simulates B replications of samples of size n from `family` and
/// accumulates the mean and standard deviation of each process.
pub fn simulate_decomposition(
    family: &FamilySpec,
    n: usize,
    replications: usize,
    seed: u64,
    options: &ProcessOptions,
) -> Result<ProcessCurves> {
    let sigma0 = exponential_scale(family)?;
    if n < 10 {
        return Err(Error::Shape(format!("need n ≥ 10, got {n}")));
    }
    if replications < 100 {
        return Err(Error::Config(format!(
            "need at least 100 replications, got {replications}"
        )));
    }
    for &(s, t) in &options.covariance_pairs {
        durbin_covariance(s, t)?;
    }
    let pc = PopulationConstants::exponential(sigma0);
    let ts = options.grid.points().to_vec();
    let g = ts.len();
    let mut extra = Vec::new();
    let mut pairs = Vec::new();
    for &(s, t) in &options.covariance_pairs {
        let mut idx = |p: f64| {
            let k = extra.iter().position(|&e| e == p).unwrap_or_else(|| {
                extra.push(p);
                extra.len() - 1
            });
            6 * g + k
        };
        let a = idx(s);
        let b = idx(t);
        pairs.push((a, b));
    }
    let dim = 6 * g + extra.len();

    let run = || -> Vec<Moments> {
        (0..replications.div_ceil(BLOCK))
            .into_par_iter()
            .map(|b| {
                let mut m = Moments::new(dim, pairs.clone());
                for i in b * BLOCK..((b + 1) * BLOCK).min(replications) {
                    let mut rng = stream(seed, &format!("process/{family}/{n}"), i as u64);
                    let x = family.sample(n, &mut rng).expect("n ≥ 10");
                    let z = if options.independent_normals {
                        Some(FamilySpec::normal(0.0, 1.0).unwrap().sample(n, &mut rng).unwrap())
                    } else {
                        None
                    };
                    let (v, id) = replication(&x, sigma0, &ts, &extra, z.as_deref(), &pc, family);
                    m.identity_error = m.identity_error.max(id);
                    m.push(&v);
                }
                m
            })
            .collect()
    };
    let blocks = match options.threads {
        None => run(),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?
            .install(run),
    };
    let mut total = Moments::new(dim, pairs.clone());
    for b in &blocks {
        total.merge(b);
    }
    let denom = total.count - 1.0;
    let mut mean = Vec::with_capacity(6);
    let mut sd = Vec::with_capacity(6);
    for p in 0..6 {
        mean.push(total.mean[p * g..(p + 1) * g].to_vec());
        sd.push(
            total.m2[p * g..(p + 1) * g]
                .iter()
                .map(|m| (m / denom).sqrt())
                .collect(),
        );
    }
    let covariances = options
        .covariance_pairs
        .iter()
        .zip(&total.c2)
        .map(|(&pair, c)| (pair, c / denom))
        .collect();
    Ok(ProcessCurves {
        t: ts,
        mean,
        sd,
        n,
        replications,
        family: *family,
        seed,
        independent_normals: options.independent_normals,
        identity_error: total.identity_error,
        covariances,
        constants: pc,
    })
}
