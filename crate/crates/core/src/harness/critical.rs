//! Simulated null critical values.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::distributions::{Family, FamilySpec};
use crate::error::{Error, Result};
use crate::rng::stream;
use crate::statistics::{ad_of, cf_of, cvm_of, direct_statistics, CfWeight, GofResult, StatKind};
use crate::transforms::ZScores;

/// Identifies one simulated null law. Statistics on normal scores depend
/// only on r; direct statistics also depend on the null family and n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CriticalKey {
    pub statistic: StatKind,
    pub r: usize,
    pub direct: Option<(Family, usize)>,
}

impl CriticalKey {
    pub fn normalized(statistic: StatKind, r: usize) -> Self {
        CriticalKey {
            statistic,
            r,
            direct: None,
        }
    }

    pub fn direct(statistic: StatKind, family: Family, n: usize, r: usize) -> Self {
        CriticalKey {
            statistic,
            r,
            direct: Some((family, n)),
        }
    }

    /// The `statistic` column of the CSV: `A2`, or `DS_A2:exp:40`.
    pub fn label(&self) -> String {
        match self.direct {
            None => self.statistic.name().to_string(),
            Some((family, n)) => format!("{}:{}:{n}", self.statistic.name(), family.name()),
        }
    }

    fn from_label(label: &str, r: usize) -> Result<Self> {
        let mut parts = label.split(':');
        let statistic: StatKind = parts.next().unwrap_or("").parse()?;
        let rest: Vec<&str> = parts.collect();
        let key = match (statistic.is_direct(), rest.as_slice()) {
            (false, []) => CriticalKey::normalized(statistic, r),
            (true, [family, n]) => {
                let n = n
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad sample size in `{label}`")))?;
                CriticalKey::direct(statistic, family.parse()?, n, r)
            }
            _ => return Err(Error::Parse(format!("malformed statistic label `{label}`"))),
        };
        Ok(key)
    }
}

impl fmt::Display for CriticalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (r={})", self.label(), self.r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalEntry {
    pub key: CriticalKey,
    pub level: f64,
    pub value: f64,
    pub replications: usize,
    pub seed: u64,
}

pub const CRITICAL_HEADER: &str = "statistic,r,level,critical_value,replications,seed";

/// Critical values are stored rounded to six decimals so that the CSV form
/// is lossless.
fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

/// Upper α quantile of a sorted sample: the ⌈(1 − α)B⌉-th smallest value.
pub fn upper_quantile(sorted: &[f64], alpha: f64) -> f64 {
    let b = sorted.len() as f64;
    let k = ((1.0 - alpha) * b - 1e-9).ceil().max(1.0) as usize;
    sorted[k.min(sorted.len()) - 1]
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CriticalValueTable {
    entries: Vec<CriticalEntry>,
    null_samples: BTreeMap<CriticalKey, Vec<f64>>,
    warnings: Vec<String>,
}

impl CriticalValueTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[CriticalEntry] {
        &self.entries
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, entry: CriticalEntry) {
        let entry = CriticalEntry {
            value: round6(entry.value),
            ..entry
        };
        match self
            .entries
            .iter_mut()
            .find(|e| e.key == entry.key && e.level == entry.level)
        {
            Some(e) => *e = entry,
            None => self.entries.push(entry),
        }
    }

    /// Adds the entries of `other`, replacing any with the same key and level.
    pub fn merge(&mut self, other: CriticalValueTable) {
        for e in other.entries {
            self.insert(e);
        }
        self.null_samples.extend(other.null_samples);
        self.warnings.extend(other.warnings);
    }

    pub fn contains(&self, key: &CriticalKey) -> bool {
        self.entries.iter().any(|e| &e.key == key)
    }

    /// (level, critical value) pairs for `key`, ascending in level.
    pub fn critical_values(&self, key: &CriticalKey) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = self
            .entries
            .iter()
            .filter(|e| &e.key == key)
            .map(|e| (e.level, e.value))
            .collect();
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }

    pub fn critical_value(&self, key: &CriticalKey, level: f64) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| &e.key == key && e.level == level)
            .map(|e| e.value)
    }

    /// The sorted simulated null sample, when the table was simulated in
    /// this process rather than read from a file.
    pub fn null_sample(&self, key: &CriticalKey) -> Option<&[f64]> {
        self.null_samples.get(key).map(|v| v.as_slice())
    }

    /// Fraction of simulated null values at least as large as `value`.
    pub fn p_value(&self, key: &CriticalKey, value: f64) -> Option<f64> {
        self.null_sample(key).map(|s| {
            let below = s.partition_point(|&x| x < value);
            (s.len() - below) as f64 / s.len() as f64
        })
    }

    /// Builds the decision record for an observed statistic value.
    pub fn decide(&self, key: &CriticalKey, value: f64) -> Result<GofResult> {
        let critical_values = self.critical_values(key);
        if critical_values.is_empty() {
            let have: Vec<String> = self
                .entries
                .iter()
                .map(|e| e.key.to_string())
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect();
            return Err(Error::Config(format!(
                "no critical values for {key}; table has {}",
                if have.is_empty() {
                    "none".into()
                } else {
                    have.join(", ")
                }
            )));
        }
        Ok(GofResult {
            statistic: key.statistic,
            value,
            critical_values,
            p_value: self.p_value(key, value),
            warnings: Vec::new(),
        })
    }

    fn add_simulated(&mut self, key: CriticalKey, mut sample: Vec<f64>, levels: &[f64], seed: u64) {
        sample.sort_by(f64::total_cmp);
        let b = sample.len();
        for &level in levels {
            if (level * b as f64) < 10.0 {
                let msg = format!(
                    "{key}: only {:.0} of {b} replications lie beyond the {level} quantile",
                    level * b as f64
                );
                log::warn!("{msg}");
                self.warnings.push(msg);
            }
            self.insert(CriticalEntry {
                key,
                level,
                value: upper_quantile(&sample, level),
                replications: b,
                seed,
            });
        }
        self.null_samples.insert(key, sample);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CRITICAL_HEADER);
        out.push('\n');
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{:.6},{},{}\n",
                e.key.label(),
                e.key.r,
                e.level,
                e.value,
                e.replications,
                e.seed
            ));
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
        match lines.next() {
            Some(h) if h.trim() == CRITICAL_HEADER => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected header `{CRITICAL_HEADER}`, found `{}`",
                    other.unwrap_or("")
                )))
            }
        }
        let mut table = CriticalValueTable::new();
        for (i, line) in lines.enumerate() {
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            let bad = |what: &str| Error::Parse(format!("row {}: bad {what} in `{line}`", i + 1));
            if f.len() != 6 {
                return Err(bad("field count"));
            }
            let r = f[1].parse().map_err(|_| bad("r"))?;
            table.insert(CriticalEntry {
                key: CriticalKey::from_label(f[0], r)?,
                level: f[2].parse().map_err(|_| bad("level"))?,
                value: f[3].parse().map_err(|_| bad("critical_value"))?,
                replications: f[4].parse().map_err(|_| bad("replications"))?,
                seed: f[5].parse().map_err(|_| bad("seed"))?,
            });
        }
        Ok(table)
    }
}

fn check_request(levels: &[f64], replications: usize) -> Result<()> {
    if replications < 2 {
        return Err(Error::Config(format!(
            "need at least 2 replications, got {replications}"
        )));
    }
    if let Some(l) = levels.iter().find(|l| !(**l > 0.0 && **l < 1.0)) {
        return Err(Error::Config(format!("level {l} outside (0, 1)")));
    }
    Ok(())
}

/// Null laws of the normal-score statistics for sample size r: each
/// replication standardises r independent standard normal draws.
pub fn simulate_normalized(
    statistics: &[StatKind],
    r: usize,
    levels: &[f64],
    replications: usize,
    seed: u64,
    w: CfWeight,
) -> Result<CriticalValueTable> {
    check_request(levels, replications)?;
    if r < 2 {
        return Err(Error::Shape(format!("need r ≥ 2, got {r}")));
    }
    if let Some(s) = statistics.iter().find(|s| s.is_direct()) {
        return Err(Error::Config(format!("{s} needs a null family and n")));
    }
    let tag = format!("critical/normal/{r}");
    let draws: Vec<Vec<f64>> = (0..replications as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, &tag, i);
            let y = FamilySpec::normal(0.0, 1.0)
                .expect("standard normal")
                .sample(r, &mut rng)
                .expect("r ≥ 2");
            let z = ZScores::standardize(y).expect("continuous draws");
            statistics
                .iter()
                .map(|s| match s {
                    StatKind::A2 => ad_of(z.values()).unwrap_or(f64::INFINITY),
                    StatKind::W2 => cvm_of(z.values()),
                    _ => cf_of(z.values(), w),
                })
                .collect()
        })
        .collect();
    let mut table = CriticalValueTable::new();
    for (k, &s) in statistics.iter().enumerate() {
        let sample = draws.iter().map(|d| d[k]).collect();
        table.add_simulated(CriticalKey::normalized(s, r), sample, levels, seed);
    }
    Ok(table)
}

/// Null laws of the direct statistics under Exp(1) or N(0,1) censored
/// samples; both laws are parameter free.
pub fn simulate_direct(
    family: Family,
    n: usize,
    r: usize,
    levels: &[f64],
    replications: usize,
    seed: u64,
) -> Result<CriticalValueTable> {
    check_request(levels, replications)?;
    let spec = match family {
        Family::Exponential => FamilySpec::exponential(1.0)?,
        Family::Normal => FamilySpec::normal(0.0, 1.0)?,
        other => {
            return Err(Error::UnsupportedNull(format!(
                "direct statistics are defined for exp and normal, not {}",
                other.name()
            )))
        }
    };
    if r < 2 || r > n {
        return Err(Error::Shape(format!("need 2 ≤ r ≤ n, got r={r}, n={n}")));
    }
    let tag = format!("critical/{}/{n}/{r}", family.name());
    let draws: Vec<(f64, f64)> = (0..replications as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, &tag, i);
            loop {
                let s = spec.sample_censored(n, r, &mut rng).expect("valid shape");
                if let Ok(d) = direct_statistics(&s, family) {
                    return (d.a2, d.w2);
                }
            }
        })
        .collect();
    let mut table = CriticalValueTable::new();
    table.add_simulated(
        CriticalKey::direct(StatKind::DsA2, family, n, r),
        draws.iter().map(|d| d.0).collect(),
        levels,
        seed,
    );
    table.add_simulated(
        CriticalKey::direct(StatKind::DsW2, family, n, r),
        draws.iter().map(|d| d.1).collect(),
        levels,
        seed,
    );
    Ok(table)
}

/// Simulates the null law of a single statistic. Direct statistics need
/// `direct = Some((null family, n))`.
pub fn simulate_critical_values(
    statistic: StatKind,
    r: usize,
    levels: &[f64],
    replications: usize,
    seed: u64,
    direct: Option<(Family, usize)>,
    w: CfWeight,
) -> Result<CriticalValueTable> {
    match (statistic.is_direct(), direct) {
        (false, _) => simulate_normalized(&[statistic], r, levels, replications, seed, w),
        (true, Some((family, n))) => {
            let mut t = simulate_direct(family, n, r, levels, replications, seed)?;
            t.entries.retain(|e| e.key.statistic == statistic);
            t.null_samples.retain(|k, _| k.statistic == statistic);
            Ok(t)
        }
        (true, None) => Err(Error::Config(format!("{statistic} needs a null family and n"))),
    }
}
