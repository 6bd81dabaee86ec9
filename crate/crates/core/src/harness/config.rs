//! Study configuration and its flat `key = value` text form.

use crate::distributions::{Family, FamilySpec};
use crate::error::{Error, Result};
use crate::statistics::{CfWeight, StatKind};
use crate::transforms::TransformKind;

pub const DEFAULT_REPLICATIONS: usize = 10_000;
pub const FAST_REPLICATIONS: usize = 2_000;
pub const DEFAULT_CRITICAL_REPLICATIONS: usize = 100_000;
pub const DEFAULT_DS_CRITICAL_REPLICATIONS: usize = 1_000_000;
pub const DEFAULT_LEVELS: [f64; 3] = [0.1, 0.05, 0.01];

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub null_family: Family,
    pub transforms: Vec<TransformKind>,
    pub statistics: Vec<StatKind>,
    pub alternatives: Vec<FamilySpec>,
    pub sample_sizes: Vec<usize>,
    pub censor_fractions: Vec<f64>,
    pub levels: Vec<f64>,
    pub replications: usize,
    pub critical_replications: usize,
    pub ds_critical_replications: usize,
    pub seed: u64,
    pub cf_weight: CfWeight,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            null_family: Family::Exponential,
            transforms: TransformKind::ALL.to_vec(),
            statistics: StatKind::NORMALIZED.to_vec(),
            alternatives: Vec::new(),
            sample_sizes: vec![100],
            censor_fractions: vec![0.5],
            levels: DEFAULT_LEVELS.to_vec(),
            replications: DEFAULT_REPLICATIONS,
            critical_replications: DEFAULT_CRITICAL_REPLICATIONS,
            ds_critical_replications: DEFAULT_DS_CRITICAL_REPLICATIONS,
            seed: 1,
            cf_weight: CfWeight::default(),
            threads: None,
        }
    }
}

pub const KEYS: [&str; 13] = [
    "null",
    "transforms",
    "statistics",
    "alternatives",
    "n",
    "censor_fraction",
    "levels",
    "replications",
    "critical_replications",
    "ds_critical_replications",
    "seed",
    "cf_weight",
    "threads",
];

/// Splits on commas or semicolons that are not inside parentheses.
fn split_list(value: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in value.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' | ';' if depth == 0 => {
                out.push(value[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(value[start..].trim());
    out.retain(|s| !s.is_empty());
    out
}

fn parse_list<T, F>(key: &str, value: &str, f: F) -> Result<Vec<T>>
where
    F: Fn(&str) -> Result<T>,
{
    let items = split_list(value);
    if items.is_empty() {
        return Err(Error::Config(format!("`{key}` needs at least one value")));
    }
    items
        .into_iter()
        .map(|s| f(s).map_err(|e| Error::Config(format!("`{key}`: {e}"))))
        .collect()
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{}`", value.trim())))
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ")
}

impl StudyConfig {
    /// The sample size r kept after censoring: round(fraction · n).
    pub fn censored_size(n: usize, fraction: f64) -> usize {
        (fraction * n as f64).round() as usize
    }

    pub fn fast(mut self) -> Self {
        self.replications = FAST_REPLICATIONS;
        self
    }

    /// Sets one key from its text value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        match key {
            "null" => self.null_family = value.parse().map_err(|e| Error::Config(format!("`null`: {e}")))?,
            "transforms" => {
                self.transforms = if value.trim().eq_ignore_ascii_case("all") {
                    TransformKind::ALL.to_vec()
                } else {
                    parse_list(key, value, |s| s.parse())?
                }
            }
            "statistics" => {
                self.statistics = if value.trim().eq_ignore_ascii_case("all") {
                    StatKind::NORMALIZED.to_vec()
                } else {
                    parse_list(key, value, |s| s.parse())?
                }
            }
            "alternatives" => self.alternatives = parse_list(key, value, |s| s.parse())?,
            "n" => self.sample_sizes = parse_list(key, value, |s| parse_num(key, s))?,
            "censor_fraction" => self.censor_fractions = parse_list(key, value, |s| parse_num(key, s))?,
            "levels" => self.levels = parse_list(key, value, |s| parse_num(key, s))?,
            "replications" => self.replications = parse_num(key, value)?,
            "critical_replications" => self.critical_replications = parse_num(key, value)?,
            "ds_critical_replications" => self.ds_critical_replications = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "cf_weight" => {
                self.cf_weight =
                    CfWeight::new(parse_num(key, value)?).map_err(|e| Error::Config(format!("`cf_weight`: {e}")))?
            }
            "threads" => {
                self.threads = match value.trim() {
                    "auto" | "" => None,
                    v => Some(parse_num(key, v)?),
                }
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown key `{other}` (expected one of {})",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Parses `key = value` lines over the defaults; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = StudyConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`, got `{line}`", i + 1)))?;
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::Config(m));
        if self.alternatives.is_empty() {
            return err("`alternatives` is empty".into());
        }
        if self.statistics.is_empty() {
            return err("`statistics` is empty".into());
        }
        if self.statistics.iter().any(|s| !s.is_direct()) && self.transforms.is_empty() {
            return err("`transforms` is empty".into());
        }
        if !matches!(self.null_family, Family::Exponential | Family::Gamma | Family::Normal) {
            return err(format!("no estimator for null family {}", self.null_family.name()));
        }
        if self.statistics.iter().any(|s| s.is_direct())
            && !matches!(self.null_family, Family::Exponential | Family::Normal)
        {
            return err(format!(
                "direct statistics are not available for the {} null",
                self.null_family.name()
            ));
        }
        if self.replications < 100 {
            return err(format!(
                "`replications` must be at least 100, got {}",
                self.replications
            ));
        }
        if self.critical_replications < 100 || self.ds_critical_replications < 100 {
            return err("critical value replications must be at least 100".into());
        }
        if let Some(l) = self.levels.iter().find(|l| !(**l > 0.0 && **l < 1.0)) {
            return err(format!("level {l} outside (0, 1)"));
        }
        if self.threads == Some(0) {
            return err("`threads` must be positive".into());
        }
        for &n in &self.sample_sizes {
            for &f in &self.censor_fractions {
                if !(f > 0.0 && f <= 1.0) {
                    return err(format!("censor_fraction {f} outside (0, 1]"));
                }
                let r = Self::censored_size(n, f);
                if r < 3 || r > n {
                    return err(format!("n={n}, censor_fraction={f} gives r={r}; need 3 ≤ r ≤ n"));
                }
            }
        }
        Ok(())
    }

    /// The resolved configuration as `key = value` lines.
    pub fn to_lines(&self) -> Vec<String> {
        vec![
            format!("null = {}", self.null_family.name()),
            format!("transforms = {}", join(&self.transforms)),
            format!("statistics = {}", join(&self.statistics)),
            format!(
                "alternatives = {}",
                self.alternatives
                    .iter()
                    .map(|a| a.to_string())
                    .collect::<Vec<_>>()
                    .join("; ")
            ),
            format!("n = {}", join(&self.sample_sizes)),
            format!("censor_fraction = {}", join(&self.censor_fractions)),
            format!("levels = {}", join(&self.levels)),
            format!("replications = {}", self.replications),
            format!("critical_replications = {}", self.critical_replications),
            format!("ds_critical_replications = {}", self.ds_critical_replications),
            format!("seed = {}", self.seed),
            format!("cf_weight = {}", self.cf_weight.a()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_echo() {
        let text = "\
# gamma block
null = exp
alternatives = gamma(4,1); weibull(2,1)
n = 40, 100
censor_fraction = 0.5, 0.75   # r/n
statistics = A2, W2, C2, DS_A2
seed = 17
";
        let cfg = StudyConfig::parse(text).unwrap();
        assert_eq!(cfg.alternatives.len(), 2);
        assert_eq!(cfg.sample_sizes, vec![40, 100]);
        assert_eq!(cfg.statistics.len(), 4);
        assert_eq!(cfg.seed, 17);
        let echoed = StudyConfig::parse(&cfg.to_lines().join("\n")).unwrap();
        assert_eq!(echoed, cfg);
    }

    #[test]
    fn errors_name_the_key() {
        let e = StudyConfig::parse("alternatives = exp(1)\nreplicates = 5").unwrap_err();
        assert!(e.to_string().contains("replicates"));
        let e = StudyConfig::parse("alternatives = exp(1)\nn = forty").unwrap_err();
        assert!(e.to_string().contains("`n`"));
        let e = StudyConfig::parse("alternatives = exp(1)\nn = 5\ncensor_fraction = 0.2").unwrap_err();
        assert!(e.to_string().contains("r=1"));
        assert!(StudyConfig::parse("null = gamma\nalternatives = exp(1)\nstatistics = DS_A2").is_err());
    }

    #[test]
    fn censored_size_rounds() {
        assert_eq!(StudyConfig::censored_size(40, 0.75), 30);
        assert_eq!(StudyConfig::censored_size(100, 0.5), 50);
        assert_eq!(StudyConfig::censored_size(10, 0.25), 3);
    }
}
