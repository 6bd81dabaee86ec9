use std::fmt::Write as _;
use std::path::Path;

use censored_gof::harness::critical::simulate_critical_values;
use censored_gof::harness::{
    emit_report, run_level_study, run_power_study, sample_critical_values, simulate_direct, simulate_normalized,
    test_sample, CellResult, CriticalValueTable, StudyConfig,
};
use censored_gof::process_lab::{simulate_decomposition, ProcessGrid, ProcessOptions};
use censored_gof::{estimate, CensoredSample, CfWeight, Family, FamilySpec, StatKind, TransformKind};

use crate::{CritvalsArgs, Failure, GofArgs, Outcome, PowerArgs, ProcessArgs};

/// Largest tolerated decomposition identity error per replication.
const IDENTITY_TOLERANCE: f64 = 1e-10;

fn usage(m: impl Into<String>) -> Failure {
    Failure::Usage(m.into())
}

fn parse_list<T: std::str::FromStr<Err = censored_gof::Error>>(flag: &str, value: &str) -> Result<Vec<T>, Failure> {
    let items: Vec<&str> = value.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(usage(format!("{flag} needs at least one value")));
    }
    items
        .into_iter()
        .map(|s| s.parse().map_err(|e| usage(format!("{flag}: {e}"))))
        .collect()
}

fn parse_transforms(value: &str) -> Result<Vec<TransformKind>, Failure> {
    if value.trim().eq_ignore_ascii_case("all") {
        return Ok(TransformKind::ALL.to_vec());
    }
    parse_list("--transform", value)
}

fn parse_statistics(flag: &str, value: &str) -> Result<Vec<StatKind>, Failure> {
    if value.trim().eq_ignore_ascii_case("all") {
        return Ok(StatKind::NORMALIZED.to_vec());
    }
    parse_list(flag, value)
}

fn parse_levels(value: &str) -> Result<Vec<f64>, Failure> {
    let mut out = Vec::new();
    for s in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let l: f64 = s.parse().map_err(|_| usage(format!("--levels: cannot parse `{s}`")))?;
        if !(l > 0.0 && l < 1.0) {
            return Err(usage(format!("--levels: {l} outside (0, 1)")));
        }
        out.push(l);
    }
    if out.is_empty() {
        return Err(usage("--levels needs at least one value"));
    }
    Ok(out)
}

fn cf_weight(a: f64) -> Result<CfWeight, Failure> {
    CfWeight::new(a).map_err(|e| usage(format!("--cf-weight: {e}")))
}

/// Writes `body` preceded by `#` comment lines to `out`, or to stdout.
fn write_output(out: Option<&Path>, comments: &[String], body: &str) -> Result<(), Failure> {
    let mut text = String::new();
    for c in comments {
        let _ = writeln!(text, "# {c}");
    }
    text.push_str(body);
    match out {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Failure::Run(format!("cannot write {}: {e}", p.display())))?;
            for c in comments {
                println!("# {c}");
            }
            println!("wrote {}", p.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

/// Reads one value per line, skipping blanks and `#` comments.
pub fn read_values(path: &Path) -> Result<Vec<f64>, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::Run(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let x: f64 = line
            .parse()
            .map_err(|_| Failure::Run(format!("{} line {}: cannot parse `{line}`", path.display(), i + 1)))?;
        if !x.is_finite() {
            return Err(Failure::Run(format!(
                "{} line {}: value is not finite",
                path.display(),
                i + 1
            )));
        }
        out.push(x);
    }
    Ok(out)
}

/// Resolves the censored sample from the values read and the --n/--r flags.
fn censored_sample(mut values: Vec<f64>, n: Option<usize>, r: Option<usize>) -> Result<CensoredSample, Failure> {
    if values.windows(2).any(|w| w[1] < w[0]) {
        eprintln!("note: input is not sorted; sorting ascending");
        values.sort_by(f64::total_cmp);
    }
    let read = values.len();
    let n = match (n, r) {
        (Some(n), _) => n,
        (None, Some(_)) => read,
        (None, None) => {
            return Err(usage(
                "missing --n <N>: the total sample size, censored values included",
            ))
        }
    };
    if let Some(r) = r {
        if r > read {
            return Err(usage(format!("--r {r} exceeds the {read} values read")));
        }
        values.truncate(r);
    }
    let r = values.len();
    if r < 3 {
        return Err(usage(format!("need at least 3 observed values, got {r}")));
    }
    if r > n {
        return Err(usage(format!("{r} observed values exceed --n {n}")));
    }
    Ok(CensoredSample::new(values, n)?)
}

pub fn gof(a: &GofArgs) -> Result<Outcome, Failure> {
    let null: Family = a.null.parse().map_err(|e| usage(format!("--null: {e}")))?;
    if !matches!(null, Family::Exponential | Family::Gamma | Family::Normal) {
        return Err(usage(format!(
            "--null: no estimator for {}; use exp, gamma or normal",
            null.name()
        )));
    }
    let transforms = parse_transforms(&a.transform)?;
    let statistics = parse_statistics("--statistic", &a.statistic)?;
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(usage(format!("--alpha {} outside (0, 1)", a.alpha)));
    }
    if a.critval_reps < 100 {
        return Err(usage("--critval-reps must be at least 100"));
    }
    let w = cf_weight(a.cf_weight)?;
    if statistics.iter().any(|s| s.is_direct()) && !matches!(null, Family::Exponential | Family::Normal) {
        return Err(usage(format!(
            "direct statistics need --null exp or normal, not {}",
            null.name()
        )));
    }

    if a.n.is_none() && a.r.is_none() {
        return Err(usage(
            "missing --n <N>: the total sample size, censored values included",
        ));
    }
    let s = censored_sample(read_values(&a.data)?, a.n, a.r)?;
    let (n, r) = (s.n(), s.r());
    let est = estimate(null, &s)?;

    let mut levels = vec![0.1, 0.05, 0.01];
    if !levels.contains(&a.alpha) {
        levels.push(a.alpha);
    }
    let table = match &a.critvals {
        Some(p) => {
            let text =
                std::fs::read_to_string(p).map_err(|e| Failure::Run(format!("cannot read {}: {e}", p.display())))?;
            CriticalValueTable::parse_csv(&text)?
        }
        None => sample_critical_values(null, n, r, &statistics, &levels, a.critval_reps, a.seed, w)?,
    };
    let rows = test_sample(&s, null, &transforms, &statistics, &table, w)?;
    let mut warned = std::collections::BTreeSet::new();
    for row in &rows {
        for m in &row.result.warnings {
            if warned.insert((row.transform, m.clone())) {
                eprintln!("warning: {}: {m}", transform_label(row.transform));
            }
        }
    }

    let mut rejected = false;
    for row in &rows {
        match row.result.reject(a.alpha) {
            Some(x) => rejected |= x,
            None => {
                return Err(Failure::Run(format!(
                    "no critical value at level {} for {}",
                    a.alpha, row.result.statistic
                )))
            }
        }
    }

    let mut comments = vec![
        "command = gof".to_string(),
        format!("data = {}", a.data.display()),
        format!("n = {n}"),
        format!("r = {r}"),
        format!("null = {}", null.name()),
        format!("estimate = {}", est.spec),
        format!("alpha = {}", a.alpha),
        format!("cf_weight = {}", w.a()),
        format!("seed = {}", a.seed),
    ];
    match &a.critvals {
        Some(p) => comments.push(format!("critvals = {}", p.display())),
        None => comments.push(format!("critval_reps = {}", a.critval_reps)),
    }
    for c in &comments {
        println!("# {c}");
    }
    print!("{}", render_text(&rows, a.alpha));
    if let Some(p) = &a.csv {
        let mut text = String::new();
        for c in &comments {
            let _ = writeln!(text, "# {c}");
        }
        text.push_str(&render_csv(&rows));
        std::fs::write(p, text).map_err(|e| Failure::Run(format!("cannot write {}: {e}", p.display())))?;
    }
    Ok(if rejected { Outcome::Rejected } else { Outcome::Ran })
}

fn transform_label(t: Option<TransformKind>) -> &'static str {
    t.map_or("none", |t| t.name())
}

fn render_text(rows: &[CellResult], alpha: f64) -> String {
    let mut out = format!(
        "{:<9} {:<9} {:>12} {:>12} {:>8}  reject\n",
        "transform",
        "statistic",
        "value",
        format!("cv({alpha})"),
        "p"
    );
    for row in rows {
        let res = &row.result;
        let cv = res
            .critical_values
            .iter()
            .find(|(l, _)| *l == alpha)
            .map_or(f64::NAN, |c| c.1);
        let p = res.p_value.map_or("-".to_string(), |p| format!("{p:.4}"));
        let reject = if res.reject(alpha) == Some(true) { "yes" } else { "no" };
        let _ = writeln!(
            out,
            "{:<9} {:<9} {:>12.6} {:>12.6} {:>8}  {reject}",
            transform_label(row.transform),
            res.statistic.name(),
            res.value,
            cv,
            p
        );
    }
    out
}

fn render_csv(rows: &[CellResult]) -> String {
    let mut out = String::from("transform,statistic,value,level,critical_value,p_value,reject\n");
    for row in rows {
        let res = &row.result;
        for &(level, cv) in &res.critical_values {
            let p = res.p_value.map_or(String::new(), |p| p.to_string());
            let _ = writeln!(
                out,
                "{},{},{},{level},{cv},{p},{}",
                transform_label(row.transform),
                res.statistic.name(),
                res.value,
                res.value > cv
            );
        }
    }
    out
}

pub fn critvals(a: &CritvalsArgs) -> Result<Outcome, Failure> {
    let statistics = parse_statistics("--statistic", &a.statistic)?;
    let levels = parse_levels(&a.levels)?;
    let w = cf_weight(a.cf_weight)?;
    if a.reps < 100 {
        return Err(usage("--reps must be at least 100"));
    }
    if a.r < 3 {
        return Err(usage(format!("--r must be at least 3, got {}", a.r)));
    }
    let direct: Vec<StatKind> = statistics.iter().copied().filter(|s| s.is_direct()).collect();
    let normalized: Vec<StatKind> = statistics.iter().copied().filter(|s| !s.is_direct()).collect();
    let direct_setup = if direct.is_empty() {
        None
    } else {
        let null: Family = a
            .null
            .as_deref()
            .ok_or_else(|| usage("direct statistics need --null (exp or normal)"))?
            .parse()
            .map_err(|e| usage(format!("--null: {e}")))?;
        if !matches!(null, Family::Exponential | Family::Normal) {
            return Err(usage(format!(
                "direct statistics need --null exp or normal, not {}",
                null.name()
            )));
        }
        let n = a.n.ok_or_else(|| usage("direct statistics need --n"))?;
        if n < a.r {
            return Err(usage(format!("--n {n} is smaller than --r {}", a.r)));
        }
        Some((null, n))
    };

    let mut table = CriticalValueTable::new();
    if !normalized.is_empty() {
        table.merge(simulate_normalized(&normalized, a.r, &levels, a.reps, a.seed, w)?);
    }
    if let Some((null, n)) = direct_setup {
        if direct.len() == StatKind::DIRECT.len() {
            table.merge(simulate_direct(null, n, a.r, &levels, a.reps, a.seed)?);
        } else {
            for &s in &direct {
                table.merge(simulate_critical_values(
                    s,
                    a.r,
                    &levels,
                    a.reps,
                    a.seed,
                    Some((null, n)),
                    w,
                )?);
            }
        }
    }

    let mut comments = vec![
        "command = critvals".to_string(),
        format!(
            "statistic = {}",
            statistics.iter().map(|s| s.name()).collect::<Vec<_>>().join(", ")
        ),
        format!("r = {}", a.r),
    ];
    if let Some((null, n)) = direct_setup {
        comments.push(format!("null = {}", null.name()));
        comments.push(format!("n = {n}"));
    }
    comments.extend([
        format!(
            "levels = {}",
            levels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", ")
        ),
        format!("reps = {}", a.reps),
        format!("cf_weight = {}", w.a()),
        format!("seed = {}", a.seed),
    ]);
    for m in table.warnings() {
        eprintln!("warning: {m}");
        comments.push(format!("warning: {m}"));
    }
    write_output(a.out.as_deref(), &comments, &table.to_csv())?;
    Ok(Outcome::Ran)
}

pub fn power(a: &PowerArgs, threads: Option<usize>) -> Result<Outcome, Failure> {
    let mut text = std::fs::read_to_string(&a.config_file)
        .map_err(|e| Failure::Run(format!("cannot read {}: {e}", a.config_file.display())))?;
    for o in &a.overrides {
        if !o.contains('=') {
            return Err(usage(format!("--set expects KEY=VALUE, got `{o}`")));
        }
        text.push('\n');
        text.push_str(o);
    }
    let mut cfg = StudyConfig::parse(&text).map_err(|e| usage(format!("{}: {e}", a.config_file.display())))?;
    if a.fast {
        cfg = cfg.fast();
    }
    cfg.threads = threads;
    let table = if a.level {
        run_level_study(&cfg)?
    } else {
        run_power_study(&cfg)?
    };
    let mut comments = vec![
        format!("command = power{}", if a.level { " (level)" } else { "" }),
        format!("config_file = {}", a.config_file.display()),
    ];
    comments.extend(cfg.to_lines());
    match &a.out {
        Some(p) => {
            emit_report(&table, &comments, p)?;
            for c in &comments {
                println!("# {c}");
            }
            println!("wrote {}", p.display());
        }
        None => write_output(None, &comments, &table.to_csv())?,
    }
    Ok(Outcome::Ran)
}

pub fn process(a: &ProcessArgs, threads: Option<usize>) -> Result<Outcome, Failure> {
    if a.n < 10 {
        return Err(usage(format!("--n must be at least 10, got {}", a.n)));
    }
    if a.b < 100 {
        return Err(usage(format!("--B must be at least 100, got {}", a.b)));
    }
    let family: FamilySpec = a.family.parse().map_err(|e| usage(format!("--family: {e}")))?;
    if family.family() != Family::Exponential {
        return Err(usage(format!(
            "--family: only exponential models are supported, got {family}"
        )));
    }
    let grid = ProcessGrid::new(a.delta, a.spacing).map_err(|e| usage(format!("grid: {e}")))?;
    let options = ProcessOptions {
        grid,
        independent_normals: a.independent_normals,
        threads,
        ..ProcessOptions::default()
    };
    let curves = simulate_decomposition(&family, a.n, a.b, a.seed, &options)?;
    if curves.identity_error > IDENTITY_TOLERANCE {
        return Err(Failure::Run(format!(
            "decomposition identity violated: error {:e} exceeds {IDENTITY_TOLERANCE:e}",
            curves.identity_error
        )));
    }
    let mut comments = vec![
        "command = process".to_string(),
        format!("n = {}", a.n),
        format!("B = {}", a.b),
        format!("delta = {}", a.delta),
        format!("spacing = {}", a.spacing),
        format!("seed = {}", a.seed),
    ];
    for ((s, t), c) in &curves.covariances {
        comments.push(format!("cov(beta_n2({s}), beta_n2({t})) = {c}"));
    }
    write_output(a.out.as_deref(), &comments, &curves.to_csv())?;
    Ok(Outcome::Ran)
}
