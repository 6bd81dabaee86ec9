//! Monte Carlo power and level studies.

use rayon::prelude::*;

use crate::distributions::{Family, FamilySpec};
use crate::error::{Error, Result};
use crate::rng::{stream, RngStream};
use crate::sample::CensoredSample;
use crate::statistics::{direct_statistics, evaluate, CfWeight, StatKind};
use crate::transforms::{fitted_uniforms, normal_scores, TransformKind};

use super::config::StudyConfig;
use super::critical::{simulate_direct, simulate_normalized, CriticalKey, CriticalValueTable};
use super::report::{round1, PowerRow, PowerTable};

/// Largest tolerated share of failed replications.
pub const MAX_FAILURE_SHARE: f64 = 0.01;

/// A statistic evaluated in a study: a transform with a normal-score
/// statistic, or a direct statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub transform: Option<TransformKind>,
    pub statistic: StatKind,
}

pub fn cells(transforms: &[TransformKind], statistics: &[StatKind]) -> Vec<Cell> {
    let mut out = Vec::new();
    for &t in transforms {
        for &s in statistics.iter().filter(|s| !s.is_direct()) {
            out.push(Cell {
                transform: Some(t),
                statistic: s,
            });
        }
    }
    for &s in statistics.iter().filter(|s| s.is_direct()) {
        out.push(Cell {
            transform: None,
            statistic: s,
        });
    }
    out
}

/// Evaluates every cell on one censored sample. A sample reaching below
/// the support of the null family is impossible under the null and scores
/// +∞ in every cell, so it is rejected at every level.
pub fn evaluate_cells(s: &CensoredSample, null: Family, cells: &[Cell], w: CfWeight) -> Result<Vec<f64>> {
    if s.values()[0] <= canonical_null(null)?.support_min() {
        return Ok(vec![f64::INFINITY; cells.len()]);
    }
    let needs_fit = cells.iter().any(|c| c.transform.is_some());
    let fitted = if needs_fit {
        Some(fitted_uniforms(s, null)?.0)
    } else {
        None
    };
    let direct = if cells.iter().any(|c| c.transform.is_none()) {
        Some(direct_statistics(s, null)?)
    } else {
        None
    };
    let mut out = Vec::with_capacity(cells.len());
    let mut cache: Option<(TransformKind, crate::transforms::ZScores)> = None;
    for c in cells {
        let v = match c.transform {
            Some(t) => {
                if cache.as_ref().map(|(k, _)| *k) != Some(t) {
                    let u = fitted.as_ref().expect("fitted when a transform is requested");
                    cache = Some((t, normal_scores(u, t)?.0));
                }
                evaluate(c.statistic, &cache.as_ref().unwrap().1, w)?
            }
            None => direct.expect("direct statistics computed").get(c.statistic)?,
        };
        out.push(v);
    }
    Ok(out)
}

/// Draws a sample and evaluates all cells, redrawing once after a failure.
fn replicate(
    spec: &FamilySpec,
    n: usize,
    r: usize,
    null: Family,
    cells: &[Cell],
    w: CfWeight,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    let mut attempt = || -> Result<Vec<f64>> {
        let s = spec.sample_censored(n, r, rng)?;
        evaluate_cells(&s, null, cells, w)
    };
    match attempt() {
        Ok(v) => Ok(v),
        Err(first) => {
            log::debug!("replication failed ({first}), redrawing");
            attempt()
        }
    }
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Simulated critical values for every cell of a study at one (n, r).
pub fn study_critical_values(config: &StudyConfig, n: usize, r: usize) -> Result<CriticalValueTable> {
    let normalized: Vec<StatKind> = config.statistics.iter().copied().filter(|s| !s.is_direct()).collect();
    let mut table = CriticalValueTable::new();
    if !normalized.is_empty() {
        table.merge(simulate_normalized(
            &normalized,
            r,
            &config.levels,
            config.critical_replications,
            config.seed,
            config.cf_weight,
        )?);
    }
    if config.statistics.iter().any(|s| s.is_direct()) {
        table.merge(simulate_direct(
            config.null_family,
            n,
            r,
            &config.levels,
            config.ds_critical_replications,
            config.seed,
        )?);
    }
    Ok(table)
}

fn key_for(cell: &Cell, null: Family, n: usize, r: usize) -> CriticalKey {
    match cell.transform {
        Some(_) => CriticalKey::normalized(cell.statistic, r),
        None => CriticalKey::direct(cell.statistic, null, n, r),
    }
}

/// Rejection rates of every (transform, statistic) cell for each
/// alternative, sample size and censoring fraction in the config.
pub fn run_power_study(config: &StudyConfig) -> Result<PowerTable> {
    config.validate()?;
    with_pool(config.threads, || power_study_inner(config))?
}

fn power_study_inner(config: &StudyConfig) -> Result<PowerTable> {
    let cells = cells(&config.transforms, &config.statistics);
    let mut table = PowerTable {
        rows: Vec::new(),
        comments: config.to_lines(),
    };
    let reps = config.replications;
    for &n in &config.sample_sizes {
        for &fraction in &config.censor_fractions {
            let r = StudyConfig::censored_size(n, fraction);
            let crit = study_critical_values(config, n, r)?;
            let cvs: Vec<Vec<f64>> = cells
                .iter()
                .map(|c| {
                    let key = key_for(c, config.null_family, n, r);
                    config
                        .levels
                        .iter()
                        .map(|&l| crit.critical_value(&key, l).expect("simulated above"))
                        .collect()
                })
                .collect();
            for alt in &config.alternatives {
                let tag = format!("power/{}/{alt}/{n}/{r}", config.null_family.name());
                let outcomes: Vec<std::result::Result<Vec<f64>, String>> = (0..reps as u64)
                    .into_par_iter()
                    .map(|i| {
                        let mut rng = stream(config.seed, &tag, i);
                        replicate(alt, n, r, config.null_family, &cells, config.cf_weight, &mut rng)
                            .map_err(|e| e.to_string())
                    })
                    .collect();
                let failures = outcomes.iter().filter(|o| o.is_err()).count();
                if failures as f64 > MAX_FAILURE_SHARE * reps as f64 {
                    let last = outcomes.iter().rev().find_map(|o| o.as_ref().err()).unwrap();
                    return Err(Error::Numeric(format!(
                        "{alt}, n={n}, r={r}: {failures} of {reps} replications failed (last: {last})"
                    )));
                }
                if failures > 0 {
                    log::warn!("{alt}, n={n}, r={r}: {failures} failed replications excluded");
                }
                let ok = (reps - failures) as f64;
                for (ci, cell) in cells.iter().enumerate() {
                    for (li, &level) in config.levels.iter().enumerate() {
                        let rejections = outcomes
                            .iter()
                            .filter_map(|o| o.as_ref().ok())
                            .filter(|v| v[ci] > cvs[ci][li])
                            .count();
                        table.rows.push(PowerRow {
                            null: config.null_family,
                            alternative: *alt,
                            n,
                            r,
                            transform: cell.transform,
                            statistic: cell.statistic,
                            level,
                            reject_pct: round1(100.0 * rejections as f64 / ok),
                            replications: reps,
                            failures,
                            seed: config.seed,
                        });
                    }
                }
            }
        }
    }
    Ok(table)
}

/// The null model used for level studies when the config names none.
pub fn canonical_null(family: Family) -> Result<FamilySpec> {
    match family {
        Family::Exponential => FamilySpec::exponential(1.0),
        Family::Gamma => FamilySpec::gamma(2.0, 1.0),
        Family::Normal => FamilySpec::normal(0.0, 1.0),
        other => Err(Error::UnsupportedNull(other.name().into())),
    }
}

/// A power study whose alternatives are members of the null family: the
/// listed ones if any, else the canonical null model.
pub fn run_level_study(config: &StudyConfig) -> Result<PowerTable> {
    let mut cfg = config.clone();
    cfg.alternatives.retain(|a| a.family() == config.null_family);
    if cfg.alternatives.is_empty() {
        cfg.alternatives.push(canonical_null(config.null_family)?);
    }
    run_power_study(&cfg)
}

/// Simulated values of each cell's statistic under data drawn from `spec`,
/// one vector per cell in the order of `cells`.
#[allow(clippy::too_many_arguments)]
pub fn simulate_statistics(
    spec: &FamilySpec,
    null: Family,
    n: usize,
    r: usize,
    cells: &[Cell],
    replications: usize,
    seed: u64,
    w: CfWeight,
) -> Result<Vec<Vec<f64>>> {
    let tag = format!("statistics/{}/{spec}/{n}/{r}", null.name());
    let outcomes: Vec<Result<Vec<f64>>> = (0..replications as u64)
        .into_par_iter()
        .map(|i| replicate(spec, n, r, null, cells, w, &mut stream(seed, &tag, i)))
        .collect();
    let mut out = vec![Vec::with_capacity(replications); cells.len()];
    let mut failures = 0;
    for o in outcomes {
        match o {
            Ok(v) => {
                for (k, x) in v.into_iter().enumerate() {
                    out[k].push(x);
                }
            }
            Err(_) => failures += 1,
        }
    }
    if failures as f64 > MAX_FAILURE_SHARE * replications as f64 {
        return Err(Error::Numeric(format!(
            "{failures} of {replications} replications failed"
        )));
    }
    Ok(out)
}
