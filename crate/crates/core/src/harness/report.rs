//! Power tables and CSV output.

use std::path::Path;

use crate::distributions::{Family, FamilySpec};
use crate::error::{Error, Result};
use crate::statistics::StatKind;
use crate::transforms::TransformKind;

use super::critical::CriticalValueTable;

pub const POWER_HEADER: &str =
    "null,alternative,alt_params,n,r,transform,statistic,level,reject_pct,replications,failures,seed";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerRow {
    pub null: Family,
    pub alternative: FamilySpec,
    pub n: usize,
    pub r: usize,
    /// `None` for the direct statistics.
    pub transform: Option<TransformKind>,
    pub statistic: StatKind,
    pub level: f64,
    /// Rejection percentage, rounded to one decimal.
    pub reject_pct: f64,
    pub replications: usize,
    pub failures: usize,
    pub seed: u64,
}

impl PowerRow {
    /// True when the data are drawn from the null family itself.
    pub fn is_level_row(&self) -> bool {
        self.alternative.family() == self.null
    }
}

pub(crate) fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PowerTable {
    pub rows: Vec<PowerRow>,
    /// Free-text lines written as `#` comments, typically the resolved config.
    pub comments: Vec<String>,
}

impl PowerTable {
    pub fn find(
        &self,
        alternative: &FamilySpec,
        n: usize,
        r: usize,
        transform: Option<TransformKind>,
        statistic: StatKind,
        level: f64,
    ) -> Option<&PowerRow> {
        self.rows.iter().find(|row| {
            &row.alternative == alternative
                && row.n == n
                && row.r == r
                && row.transform == transform
                && row.statistic == statistic
                && row.level == level
        })
    }

    pub fn reject_pct(
        &self,
        alternative: &FamilySpec,
        n: usize,
        r: usize,
        transform: Option<TransformKind>,
        statistic: StatKind,
        level: f64,
    ) -> Option<f64> {
        self.find(alternative, n, r, transform, statistic, level)
            .map(|row| row.reject_pct)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            out.push_str(&format!("# {c}\n"));
        }
        out.push_str(POWER_HEADER);
        out.push('\n');
        for row in &self.rows {
            let params: Vec<String> = row
                .alternative
                .params()
                .as_slice()
                .iter()
                .map(|p| p.to_string())
                .collect();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{:.1},{},{},{}\n",
                row.null.name(),
                row.alternative.family().name(),
                params.join(";"),
                row.n,
                row.r,
                row.transform.map_or("none", |t| t.name()),
                row.statistic,
                row.level,
                row.reject_pct,
                row.replications,
                row.failures,
                row.seed
            ));
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut table = PowerTable::default();
        let mut header_seen = false;
        for (i, line) in text.lines().enumerate() {
            if let Some(c) = line.strip_prefix('#') {
                table.comments.push(c.strip_prefix(' ').unwrap_or(c).to_string());
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            if !header_seen {
                if line.trim() != POWER_HEADER {
                    return Err(Error::Parse(format!(
                        "expected header `{POWER_HEADER}`, found `{line}`"
                    )));
                }
                header_seen = true;
                continue;
            }
            table
                .rows
                .push(parse_row(line).map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?);
        }
        if !header_seen {
            return Err(Error::Parse("missing header".into()));
        }
        Ok(table)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_csv(&std::fs::read_to_string(path)?)
    }
}

fn parse_row(line: &str) -> Result<PowerRow> {
    let f: Vec<&str> = line.split(',').map(str::trim).collect();
    if f.len() != 12 {
        return Err(Error::Parse(format!("expected 12 fields, got {}", f.len())));
    }
    let num = |i: usize, what: &str| -> Result<f64> {
        f[i].parse().map_err(|_| Error::Parse(format!("bad {what} `{}`", f[i])))
    };
    let int = |i: usize, what: &str| -> Result<usize> {
        f[i].parse().map_err(|_| Error::Parse(format!("bad {what} `{}`", f[i])))
    };
    let family: Family = f[1].parse()?;
    let params = f[2]
        .split(';')
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad parameter `{p}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PowerRow {
        null: f[0].parse()?,
        alternative: FamilySpec::new(family, &params)?,
        n: int(3, "n")?,
        r: int(4, "r")?,
        transform: match f[5] {
            "none" => None,
            t => Some(t.parse()?),
        },
        statistic: f[6].parse()?,
        level: num(7, "level")?,
        reject_pct: num(8, "reject_pct")?,
        replications: int(9, "replications")?,
        failures: int(10, "failures")?,
        seed: f[11]
            .parse()
            .map_err(|_| Error::Parse(format!("bad seed `{}`", f[11])))?,
    })
}

/// Anything that serialises to one of the CSV report formats.
pub trait Report {
    fn to_csv_text(&self) -> String;
}

impl Report for PowerTable {
    fn to_csv_text(&self) -> String {
        self.to_csv()
    }
}

impl Report for CriticalValueTable {
    fn to_csv_text(&self) -> String {
        self.to_csv()
    }
}

/// Writes the report, preceded by `comments` as `#` lines.
pub fn emit_report<T: Report>(table: &T, comments: &[String], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    for c in comments {
        out.push_str(&format!("# {c}\n"));
    }
    out.push_str(&table.to_csv_text());
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(pct: f64) -> PowerRow {
        PowerRow {
            null: Family::Exponential,
            alternative: FamilySpec::gamma(4.0, 1.0).unwrap(),
            n: 100,
            r: 75,
            transform: Some(TransformKind::Lhb),
            statistic: StatKind::A2,
            level: 0.05,
            reject_pct: pct,
            replications: 10_000,
            failures: 0,
            seed: 3,
        }
    }

    #[test]
    fn csv_round_trip() {
        let mut ds = row(round1(97.25));
        ds.transform = None;
        ds.statistic = StatKind::DsW2;
        let t = PowerTable {
            rows: vec![
                row(89.1),
                ds,
                PowerRow {
                    alternative: FamilySpec::student_t(2.0).unwrap(),
                    ..row(0.0)
                },
            ],
            comments: vec!["seed = 3".into()],
        };
        let text = t.to_csv();
        assert!(text.lines().nth(1).unwrap() == POWER_HEADER);
        assert!(text.contains("exp,gamma,4;1,100,75,LHB,A2,0.05,89.1,10000,0,3"));
        assert!(text.contains(",none,DS_W2,"));
        assert_eq!(PowerTable::parse_csv(&text).unwrap(), t);
    }

    #[test]
    fn rejects_bad_header() {
        assert!(PowerTable::parse_csv("null,alt\n").is_err());
    }
}
