//! One-shot tests of a single censored sample.

use crate::distributions::Family;
use crate::error::{Error, Result};
use crate::sample::CensoredSample;
use crate::statistics::{direct_statistics, evaluate, CfWeight, GofResult, StatKind};
use crate::transforms::{transformation7, TransformKind};

use super::critical::{simulate_direct, simulate_normalized, CriticalKey, CriticalValueTable};

/// One (transform, statistic) decision; direct statistics have no transform.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub transform: Option<TransformKind>,
    pub result: GofResult,
}

/// Simulated critical values for every requested statistic at (n, r).
#[allow(clippy::too_many_arguments)]
pub fn sample_critical_values(
    null: Family,
    n: usize,
    r: usize,
    statistics: &[StatKind],
    levels: &[f64],
    replications: usize,
    seed: u64,
    w: CfWeight,
) -> Result<CriticalValueTable> {
    let normalized: Vec<StatKind> = statistics.iter().copied().filter(|s| !s.is_direct()).collect();
    let mut table = CriticalValueTable::new();
    if !normalized.is_empty() {
        table.merge(simulate_normalized(&normalized, r, levels, replications, seed, w)?);
    }
    if statistics.iter().any(|s| s.is_direct()) {
        table.merge(simulate_direct(null, n, r, levels, replications, seed)?);
    }
    Ok(table)
}

/// Evaluates every transform × normal-score statistic, then each direct
/// statistic, on `s` and decides each against `table`.
pub fn test_sample(
    s: &CensoredSample,
    null: Family,
    transforms: &[TransformKind],
    statistics: &[StatKind],
    table: &CriticalValueTable,
    w: CfWeight,
) -> Result<Vec<CellResult>> {
    let (n, r) = (s.n(), s.r());
    let normalized: Vec<StatKind> = statistics.iter().copied().filter(|k| !k.is_direct()).collect();
    let direct: Vec<StatKind> = statistics.iter().copied().filter(|k| k.is_direct()).collect();
    if !normalized.is_empty() && transforms.is_empty() {
        return Err(Error::Config(
            "no transform given for the normal-score statistics".into(),
        ));
    }
    let mut out = Vec::new();
    if !normalized.is_empty() {
        for &t in transforms {
            let z = transformation7(s, null, t)?;
            for &kind in &normalized {
                let value = evaluate(kind, &z.z, w)?;
                let mut result = table.decide(&CriticalKey::normalized(kind, r), value)?;
                result.warnings = z.warnings.messages();
                out.push(CellResult {
                    transform: Some(t),
                    result,
                });
            }
        }
    }
    if !direct.is_empty() {
        let d = direct_statistics(s, null)?;
        for kind in direct {
            let result = table.decide(&CriticalKey::direct(kind, null, n, r), d.get(kind)?)?;
            out.push(CellResult {
                transform: None,
                result,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::FamilySpec;
    use crate::rng::stream;

    #[test]
    fn matrix_shape_and_order() {
        let mut rng = stream(3, "single", 0);
        let s = FamilySpec::exponential(2.0)
            .unwrap()
            .sample_censored(60, 30, &mut rng)
            .unwrap();
        let stats = [StatKind::A2, StatKind::C2, StatKind::DsW2];
        let w = CfWeight::default();
        let table = sample_critical_values(Family::Exponential, 60, 30, &stats, &[0.05], 500, 1, w).unwrap();
        let cells = test_sample(&s, Family::Exponential, &TransformKind::ALL, &stats, &table, w).unwrap();
        assert_eq!(cells.len(), 5 * 2 + 1);
        assert_eq!(cells[0].transform, Some(TransformKind::Ms));
        assert_eq!(cells[1].result.statistic, StatKind::C2);
        assert_eq!(cells[10].transform, None);
        assert!(cells.iter().all(|c| c.result.reject(0.05).is_some()));
    }

    #[test]
    fn missing_critical_values_are_reported() {
        let mut rng = stream(3, "single", 1);
        let s = FamilySpec::exponential(1.0)
            .unwrap()
            .sample_censored(40, 20, &mut rng)
            .unwrap();
        let w = CfWeight::default();
        let table = sample_critical_values(Family::Exponential, 40, 21, &[StatKind::A2], &[0.05], 200, 1, w).unwrap();
        let e = test_sample(
            &s,
            Family::Exponential,
            &[TransformKind::Lhb],
            &[StatKind::A2],
            &table,
            w,
        )
        .unwrap_err();
        assert!(e.to_string().contains("no critical values"));
    }
}
