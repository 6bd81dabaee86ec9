//! Rank summaries of power tables.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::statistics::StatKind;
use crate::transforms::TransformKind;

use super::report::{PowerRow, PowerTable};

/// Summed ranks and the resulting orderings. Within each setting (null,
/// alternative, n, r) tests are ranked per transform and transforms per
/// test, highest rejection rate first, ties sharing the average rank.
#[derive(Debug, Clone, PartialEq)]
pub struct RankMatrix {
    pub transforms: Vec<TransformKind>,
    pub statistics: Vec<StatKind>,
    /// `test_sums[s][t]`: summed rank of statistic s among the tests for transform t.
    pub test_sums: Vec<Vec<f64>>,
    /// `transform_sums[s][t]`: summed rank of transform t among transforms for statistic s.
    pub transform_sums: Vec<Vec<f64>>,
    /// Order of each test within its transform (1 = lowest sum).
    pub test_rank: Vec<Vec<f64>>,
    /// Order of each transform within its test.
    pub transform_rank: Vec<Vec<f64>>,
    pub settings: usize,
}

impl RankMatrix {
    /// `left\right` pairs laid out with tests as rows and transforms as columns.
    pub fn render(&self) -> String {
        let mut out = String::from("test");
        for t in &self.transforms {
            out.push_str(&format!("\t{t}"));
        }
        out.push('\n');
        for (si, s) in self.statistics.iter().enumerate() {
            out.push_str(s.name());
            for ti in 0..self.transforms.len() {
                out.push_str(&format!(
                    "\t{}\\{}",
                    self.test_rank[si][ti], self.transform_rank[si][ti]
                ));
            }
            out.push('\n');
        }
        out
    }
}

/// Average ranks, largest value first.
pub fn descending_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

type Setting = (String, String, usize, usize);

/// Ranks the normal-score statistics and transforms at `level`. Rows where
/// the data come from the null family and rows of direct statistics are
/// left out.
pub fn rank_summary(tables: &[PowerTable], level: f64) -> Result<RankMatrix> {
    let rows: Vec<&PowerRow> = tables
        .iter()
        .flat_map(|t| &t.rows)
        .filter(|r| r.level == level && r.transform.is_some() && !r.is_level_row())
        .collect();
    if rows.is_empty() {
        return Err(Error::Coverage(vec![format!("no power rows at level {level}")]));
    }
    let transforms: Vec<TransformKind> = rows
        .iter()
        .filter_map(|r| r.transform)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let statistics: Vec<StatKind> = rows
        .iter()
        .map(|r| r.statistic)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut grid: BTreeMap<Setting, BTreeMap<(usize, usize), f64>> = BTreeMap::new();
    for r in &rows {
        let setting = (r.null.name().to_string(), r.alternative.to_string(), r.n, r.r);
        let ti = transforms.iter().position(|t| Some(*t) == r.transform).unwrap();
        let si = statistics.iter().position(|s| *s == r.statistic).unwrap();
        grid.entry(setting).or_default().insert((si, ti), r.reject_pct);
    }
    let mut missing = Vec::new();
    for (setting, cells) in &grid {
        for (si, s) in statistics.iter().enumerate() {
            for (ti, t) in transforms.iter().enumerate() {
                if !cells.contains_key(&(si, ti)) {
                    missing.push(format!(
                        "{} null, {}, n={}, r={}: {t} {s}",
                        setting.0, setting.1, setting.2, setting.3
                    ));
                }
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::Coverage(missing));
    }
    let (ns, nt) = (statistics.len(), transforms.len());
    let mut test_sums = vec![vec![0.0; nt]; ns];
    let mut transform_sums = vec![vec![0.0; nt]; ns];
    for cells in grid.values() {
        for ti in 0..nt {
            let v: Vec<f64> = (0..ns).map(|si| cells[&(si, ti)]).collect();
            for (si, rk) in descending_ranks(&v).into_iter().enumerate() {
                test_sums[si][ti] += rk;
            }
        }
        for si in 0..ns {
            let v: Vec<f64> = (0..nt).map(|ti| cells[&(si, ti)]).collect();
            for (ti, rk) in descending_ranks(&v).into_iter().enumerate() {
                transform_sums[si][ti] += rk;
            }
        }
    }
    // Lowest sum ranks first.
    let order = |v: &[f64]| -> Vec<f64> {
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        descending_ranks(&neg)
    };
    let mut test_rank = vec![vec![0.0; nt]; ns];
    for ti in 0..nt {
        let col: Vec<f64> = (0..ns).map(|si| test_sums[si][ti]).collect();
        for (si, rk) in order(&col).into_iter().enumerate() {
            test_rank[si][ti] = rk;
        }
    }
    let transform_rank = transform_sums.iter().map(|row| order(row)).collect();
    Ok(RankMatrix {
        transforms,
        statistics,
        test_sums,
        transform_sums,
        test_rank,
        transform_rank,
        settings: grid.len(),
    })
}
