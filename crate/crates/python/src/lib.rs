//! Python bindings: censored samples, parameter estimates, normal scores,
//! one-shot tests, critical values, power studies and process curves.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use censored_gof::harness::{
    run_level_study, run_power_study, sample_critical_values, test_sample, CriticalKey, CriticalValueTable, StudyConfig,
};
use censored_gof::process_lab::{simulate_decomposition, ProcessOptions};
use censored_gof::statistics::{direct_statistics, evaluate};
use censored_gof::transforms::normal_scores;
use censored_gof::{estimate as fit, transformation7, CensoredSample, CfWeight, Family, FamilySpec, StatKind};
use censored_gof::{TransformKind, UniformOrderStats, ZScores};

fn err(e: censored_gof::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = censored_gof::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

fn transforms(spec: &str) -> PyResult<Vec<TransformKind>> {
    if spec.trim().eq_ignore_ascii_case("all") {
        return Ok(TransformKind::ALL.to_vec());
    }
    spec.split(',').map(parse).collect()
}

fn statistics(spec: &str) -> PyResult<Vec<StatKind>> {
    if spec.trim().eq_ignore_ascii_case("all") {
        return Ok(StatKind::NORMALIZED.to_vec());
    }
    spec.split(',').map(parse).collect()
}

fn weight(a: f64) -> PyResult<CfWeight> {
    CfWeight::new(a).map_err(err)
}

/// The r smallest values of a sample of size n.
#[pyclass(name = "CensoredSample", frozen)]
pub struct PySample {
    inner: CensoredSample,
}

#[pymethods]
impl PySample {
    /// Unsorted values are sorted.
    #[new]
    fn new(values: Vec<f64>, n: usize) -> PyResult<Self> {
        let inner = CensoredSample::from_unsorted(values, n).map_err(err)?;
        Ok(PySample { inner })
    }

    /// Keeps the r smallest values of a complete sample.
    #[staticmethod]
    fn censor(values: Vec<f64>, r: usize) -> PyResult<Self> {
        let inner = CensoredSample::censor(values, r).map_err(err)?;
        Ok(PySample { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn r(&self) -> usize {
        self.inner.r()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.r()
    }

    fn __repr__(&self) -> String {
        format!("CensoredSample(r={}, n={})", self.inner.r(), self.inner.n())
    }
}

/// One decision; `transform` is None for direct statistics.
#[pyclass(name = "GofResult", frozen, get_all)]
pub struct PyGofResult {
    transform: Option<String>,
    statistic: String,
    value: f64,
    /// (level, critical value) pairs, ascending in level.
    critical_values: Vec<(f64, f64)>,
    p_value: Option<f64>,
    warnings: Vec<String>,
}

#[pymethods]
impl PyGofResult {
    /// True when the statistic exceeds its critical value at `level`.
    fn reject(&self, level: f64) -> PyResult<bool> {
        self.critical_values
            .iter()
            .find(|(l, _)| *l == level)
            .map(|&(_, cv)| self.value > cv)
            .ok_or_else(|| PyValueError::new_err(format!("no critical value at level {level}")))
    }

    fn __repr__(&self) -> String {
        format!(
            "GofResult({}/{}, value={:.6}, p={:?})",
            self.transform.as_deref().unwrap_or("none"),
            self.statistic,
            self.value,
            self.p_value
        )
    }
}

/// Simulated or loaded null critical values.
#[pyclass(name = "CriticalValueTable")]
pub struct PyCriticalTable {
    inner: CriticalValueTable,
}

fn key(statistic: &str, r: usize, null: Option<&str>, n: Option<usize>) -> PyResult<CriticalKey> {
    let s: StatKind = parse(statistic)?;
    if !s.is_direct() {
        return Ok(CriticalKey::normalized(s, r));
    }
    match (null, n) {
        (Some(f), Some(n)) => Ok(CriticalKey::direct(s, parse(f)?, n, r)),
        _ => Err(PyValueError::new_err(format!("{s} needs null and n"))),
    }
}

#[pymethods]
impl PyCriticalTable {
    /// Simulates the statistics in `statistics` (a comma list or "all") at
    /// (n, r). Direct statistics use the `null` family.
    #[staticmethod]
    #[pyo3(signature = (r, statistics = "all", levels = vec![0.1, 0.05, 0.01], replications = 100_000, seed = 1, null = "exp", n = None, cf_weight = 0.5))]
    #[allow(clippy::too_many_arguments)]
    fn simulate(
        py: Python<'_>,
        r: usize,
        statistics: &str,
        levels: Vec<f64>,
        replications: usize,
        seed: u64,
        null: &str,
        n: Option<usize>,
        cf_weight: f64,
    ) -> PyResult<Self> {
        let stats = self::statistics(statistics)?;
        let family: Family = parse(null)?;
        let w = weight(cf_weight)?;
        let n = n.unwrap_or(r);
        let inner = py
            .detach(|| sample_critical_values(family, n, r, &stats, &levels, replications, seed, w))
            .map_err(err)?;
        Ok(PyCriticalTable { inner })
    }

    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        Ok(PyCriticalTable {
            inner: CriticalValueTable::parse_csv(text).map_err(err)?,
        })
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.inner.warnings().to_vec()
    }

    #[pyo3(signature = (statistic, r, level, null = None, n = None))]
    fn critical_value(
        &self,
        statistic: &str,
        r: usize,
        level: f64,
        null: Option<&str>,
        n: Option<usize>,
    ) -> PyResult<Option<f64>> {
        Ok(self.inner.critical_value(&key(statistic, r, null, n)?, level))
    }
}

/// Fitted null model: (family, parameters).
#[pyfunction]
#[pyo3(signature = (sample, null = "exp"))]
fn estimate(sample: &PySample, null: &str) -> PyResult<(String, Vec<f64>)> {
    let e = fit(parse(null)?, &sample.inner).map_err(err)?;
    Ok((e.family().name().to_string(), e.params().to_vec()))
}

/// Standardised normal scores of a censored sample under `null`.
#[pyfunction]
#[pyo3(signature = (sample, null = "exp", transform = "lhb"))]
fn scores(sample: &PySample, null: &str, transform: &str) -> PyResult<Vec<f64>> {
    let t = transformation7(&sample.inner, parse(null)?, parse(transform)?).map_err(err)?;
    Ok(t.z.values().to_vec())
}

/// Complete uniform order statistics from censored ones (0 < u₁ < … < u_r < 1
/// out of a sample of n).
#[pyfunction]
fn transform_uniforms(u: Vec<f64>, n: usize, transform: &str) -> PyResult<Vec<f64>> {
    let kind: TransformKind = parse(transform)?;
    let u = UniformOrderStats::censored(u, n).map_err(err)?;
    Ok(kind.apply(&u).map_err(err)?.into_values())
}

/// Normal scores straight from censored uniform order statistics.
#[pyfunction]
fn uniform_scores(u: Vec<f64>, n: usize, transform: &str) -> PyResult<Vec<f64>> {
    let kind: TransformKind = parse(transform)?;
    let u = UniformOrderStats::censored(u, n).map_err(err)?;
    Ok(normal_scores(&u, kind).map_err(err)?.0.values().to_vec())
}

/// A2, W2 or C2 of a sample after standardisation.
#[pyfunction]
#[pyo3(signature = (values, statistic, cf_weight = 0.5))]
fn statistic(values: Vec<f64>, statistic: &str, cf_weight: f64) -> PyResult<f64> {
    let z = ZScores::standardize(values).map_err(err)?;
    evaluate(parse(statistic)?, &z, weight(cf_weight)?).map_err(err)
}

/// (DS_A2, DS_W2) of the sample under an exp or normal null.
#[pyfunction]
#[pyo3(signature = (sample, null = "exp"))]
fn direct(sample: &PySample, null: &str) -> PyResult<(f64, f64)> {
    let d = direct_statistics(&sample.inner, parse(null)?).map_err(err)?;
    Ok((d.a2, d.w2))
}

/// Tests the sample with every transform × statistic. Critical values come
/// from `table` when given, otherwise they are simulated.
#[pyfunction]
#[pyo3(signature = (sample, null = "exp", transforms = "all", statistics = "all", table = None, replications = 100_000, seed = 1, cf_weight = 0.5))]
#[allow(clippy::too_many_arguments)]
fn gof(
    py: Python<'_>,
    sample: &PySample,
    null: &str,
    transforms: &str,
    statistics: &str,
    table: Option<&PyCriticalTable>,
    replications: usize,
    seed: u64,
    cf_weight: f64,
) -> PyResult<Vec<PyGofResult>> {
    let family: Family = parse(null)?;
    let ts = self::transforms(transforms)?;
    let ss = self::statistics(statistics)?;
    let w = weight(cf_weight)?;
    let s = &sample.inner;
    let cells = py
        .detach(|| {
            let simulated;
            let table = match table {
                Some(t) => &t.inner,
                None => {
                    simulated =
                        sample_critical_values(family, s.n(), s.r(), &ss, &[0.1, 0.05, 0.01], replications, seed, w)?;
                    &simulated
                }
            };
            test_sample(s, family, &ts, &ss, table, w)
        })
        .map_err(err)?;
    Ok(cells
        .into_iter()
        .map(|c| PyGofResult {
            transform: c.transform.map(|t| t.name().to_string()),
            statistic: c.result.statistic.name().to_string(),
            value: c.result.value,
            critical_values: c.result.critical_values,
            p_value: c.result.p_value,
            warnings: c.result.warnings,
        })
        .collect())
}

/// Random sample of size n from a model such as "gamma(4,1)".
#[pyfunction]
#[pyo3(signature = (model, n, seed = 1, index = 0))]
fn sample_model(model: &str, n: usize, seed: u64, index: u64) -> PyResult<Vec<f64>> {
    let spec: FamilySpec = parse(model)?;
    let mut rng = censored_gof::rng::stream(seed, "python/sample", index);
    spec.sample(n, &mut rng).map_err(err)
}

/// Runs a power (or level) study from config text; returns the CSV.
#[pyfunction]
#[pyo3(signature = (config, fast = false, level = false))]
fn power_study(py: Python<'_>, config: &str, fast: bool, level: bool) -> PyResult<String> {
    let mut cfg = StudyConfig::parse(config).map_err(err)?;
    if fast {
        cfg = cfg.fast();
    }
    let table = py
        .detach(|| {
            if level {
                run_level_study(&cfg)
            } else {
                run_power_study(&cfg)
            }
        })
        .map_err(err)?;
    Ok(table.to_csv())
}

/// Mean and sd curves of the process decomposition as CSV.
#[pyfunction]
#[pyo3(signature = (n, replications, seed = 1, sigma = 1.0, independent_normals = false))]
fn process_curves(
    py: Python<'_>,
    n: usize,
    replications: usize,
    seed: u64,
    sigma: f64,
    independent_normals: bool,
) -> PyResult<String> {
    let family = FamilySpec::exponential(sigma).map_err(err)?;
    let options = ProcessOptions {
        independent_normals,
        ..ProcessOptions::default()
    };
    let curves = py
        .detach(|| simulate_decomposition(&family, n, replications, seed, &options))
        .map_err(err)?;
    Ok(curves.to_csv())
}

#[pymodule]
#[pyo3(name = "censored_gof")]
pub fn censored_gof_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySample>()?;
    m.add_class::<PyGofResult>()?;
    m.add_class::<PyCriticalTable>()?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(scores, m)?)?;
    m.add_function(wrap_pyfunction!(transform_uniforms, m)?)?;
    m.add_function(wrap_pyfunction!(uniform_scores, m)?)?;
    m.add_function(wrap_pyfunction!(statistic, m)?)?;
    m.add_function(wrap_pyfunction!(direct, m)?)?;
    m.add_function(wrap_pyfunction!(gof, m)?)?;
    m.add_function(wrap_pyfunction!(sample_model, m)?)?;
    m.add_function(wrap_pyfunction!(power_study, m)?)?;
    m.add_function(wrap_pyfunction!(process_curves, m)?)?;
    Ok(())
}
