use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use censored_gof::rng::stream;
use censored_gof::FamilySpec;
use tempfile::TempDir;

fn cgof(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cgof"))
        .args(args)
        .output()
        .expect("cgof runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

/// The r smallest of n unit exponential draws.
fn exponential_like(n: usize, r: usize) -> Vec<f64> {
    let mut rng = stream(2024, "cli-test", n as u64);
    FamilySpec::exponential(1.0)
        .unwrap()
        .sample_censored(n, r, &mut rng)
        .unwrap()
        .values()
        .to_vec()
}

/// Exit status 2 exactly when some row rejects.
fn check_exit(o: &Output) {
    let out = stdout(o);
    let any = result_rows(&out).iter().any(|r| r.ends_with("yes"));
    assert_eq!(o.status.code(), Some(if any { 2 } else { 0 }), "{}", stderr(o));
}

fn lines(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v}\n")).collect()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn result_rows(out: &str) -> Vec<&str> {
    out.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("transform"))
        .collect()
}

#[test]
fn gof_all_gives_five_by_three_matrix() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "x.txt", &lines(&exponential_like(100, 50)));
    let o = cgof(&["gof", s(&data), "--n", "100", "--critval-reps", "2000", "--seed", "7"]);
    check_exit(&o);
    let out = stdout(&o);
    assert!(out.contains("# seed = 7"));
    assert!(out.contains("# n = 100"));
    assert!(out.contains("# r = 50"));
    let rows = result_rows(&out);
    assert_eq!(rows.len(), 15);
    for t in ["MS", "OS", "LHB", "FK1", "FK2"] {
        assert_eq!(rows.iter().filter(|r| r.starts_with(t)).count(), 3, "{t}");
    }
}

#[test]
fn gof_rejects_with_exit_two() {
    let dir = TempDir::new().unwrap();
    let values: Vec<f64> = (0..75).map(|i| 10.0 + 0.001 * i as f64).collect();
    let data = write(&dir, "x.txt", &lines(&values));
    let o = cgof(&[
        "gof",
        s(&data),
        "--n",
        "100",
        "--transform",
        "lhb",
        "--statistic",
        "ad",
        "--critval-reps",
        "2000",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(result_rows(&stdout(&o))[0].ends_with("yes"));
}

#[test]
fn gof_usage_errors() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "x.txt", &lines(&exponential_like(100, 50)));
    let o = cgof(&["gof", s(&data)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--n"));

    let short = write(&dir, "short.txt", "0.1\n0.2\n");
    let o = cgof(&["gof", s(&short), "--n", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("at least 3"));

    let o = cgof(&["gof", s(&data), "--n", "100", "--statistic", "ks"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown statistic"));

    let o = cgof(&["gof", s(&data), "--n", "100", "--transform", "xyz"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown transform"));

    let o = cgof(&["gof", s(&data), "--n", "40"]);
    assert_eq!(o.status.code(), Some(1));

    let bad = write(&dir, "bad.txt", "0.1\nabc\n0.3\n");
    let o = cgof(&["gof", s(&bad), "--n", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"));
}

#[test]
fn gof_sorts_unsorted_input_with_notice() {
    let dir = TempDir::new().unwrap();
    let x = exponential_like(60, 30);
    let mut shuffled = x.clone();
    shuffled.reverse();
    let sorted = write(&dir, "sorted.txt", &lines(&x));
    let unsorted = write(&dir, "unsorted.txt", &lines(&shuffled));
    let args = ["--n", "60", "--critval-reps", "1000", "--statistic", "W2"];
    let a = cgof(&[&["gof", s(&sorted)][..], &args].concat());
    let b = cgof(&[&["gof", s(&unsorted)][..], &args].concat());
    assert!(!stderr(&a).contains("not sorted"));
    assert!(stderr(&b).contains("not sorted"));
    assert_eq!(result_rows(&stdout(&a)), result_rows(&stdout(&b)));
}

#[test]
fn gof_full_sample_is_truncated_by_r() {
    let dir = TempDir::new().unwrap();
    let full = exponential_like(80, 80);
    let full_file = write(&dir, "full.txt", &lines(&full));
    let cens_file = write(&dir, "cens.txt", &lines(&full[..40]));
    let args = ["--critval-reps", "1000", "--transform", "ms,lhb"];
    let a = cgof(&[&["gof", s(&full_file), "--r", "40"][..], &args].concat());
    let b = cgof(&[&["gof", s(&cens_file), "--n", "80"][..], &args].concat());
    check_exit(&a);
    assert_eq!(result_rows(&stdout(&a)), result_rows(&stdout(&b)));
}

#[test]
fn gof_direct_statistics_and_csv() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "x.txt", &lines(&exponential_like(40, 20)));
    let csv = dir.path().join("out.csv");
    let o = cgof(&[
        "gof",
        s(&data),
        "--n",
        "40",
        "--statistic",
        "DS_A2,DS_W2",
        "--critval-reps",
        "2000",
        "--csv",
        s(&csv),
    ]);
    check_exit(&o);
    let out = stdout(&o);
    let rows = result_rows(&out);
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.starts_with("none")));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("# command = gof"));
    assert!(text.contains("transform,statistic,value,level,critical_value,p_value,reject"));
    assert_eq!(text.lines().filter(|l| l.starts_with("none,DS_A2")).count(), 3);

    let o = cgof(&["gof", s(&data), "--n", "40", "--null", "gamma", "--statistic", "DS_A2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn gof_reads_critical_value_file() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "x.txt", &lines(&exponential_like(100, 50)));
    let table = dir.path().join("cv.csv");
    let o = cgof(&[
        "critvals",
        "--r",
        "50",
        "--reps",
        "2000",
        "--seed",
        "3",
        "--out",
        s(&table),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let common = ["--n", "100", "--transform", "fk1"];
    let a = cgof(&[&["gof", s(&data)][..], &common, &["--critvals", s(&table)]].concat());
    let b = cgof(
        &[
            &["gof", s(&data)][..],
            &common,
            &["--critval-reps", "2000", "--seed", "3"],
        ]
        .concat(),
    );
    check_exit(&a);
    let cv = |o: &Output| -> Vec<String> {
        result_rows(&stdout(o))
            .iter()
            .map(|r| r.split_whitespace().nth(3).unwrap().to_string())
            .collect()
    };
    assert_eq!(cv(&a), cv(&b));
}

#[test]
fn critvals_direct_exponential_five_percent() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("ds.csv");
    let o = cgof(&[
        "critvals",
        "--statistic",
        "DS_A2",
        "--null",
        "exp",
        "--n",
        "40",
        "--r",
        "20",
        "--reps",
        "1000000",
        "--levels",
        "0.05",
        "--seed",
        "11",
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# seed = 11"));
    let row = text.lines().find(|l| l.starts_with("DS_A2:exp:40,20,0.05,")).unwrap();
    let value: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
    assert!((value - 0.609).abs() < 0.01, "{value}");
}

#[test]
fn critvals_warns_on_thin_tail() {
    let o = cgof(&[
        "critvals",
        "--statistic",
        "W2",
        "--r",
        "30",
        "--reps",
        "100",
        "--levels",
        "0.01",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning"));
    assert!(stdout(&o).contains("# warning"));
    let o = cgof(&["critvals", "--statistic", "DS_W2", "--r", "30"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--null"));
}

fn small_config(dir: &TempDir) -> PathBuf {
    write(
        dir,
        "study.cfg",
        "# small study\nnull = exp\nalternatives = gamma(2,1); weibull(1.5,1)\nn = 30\ncensor_fraction = 0.5\n\
         statistics = A2, C2, DS_W2\nlevels = 0.05\nreplications = 400\ncritical_replications = 2000\n\
         ds_critical_replications = 2000\nseed = 5\n",
    )
}

#[test]
fn power_is_reproducible_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let cfg = small_config(&dir);
    let mut texts = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(format!("p{threads}.csv"));
        let o = cgof(&[
            "--threads",
            threads,
            "power",
            "--config-file",
            s(&cfg),
            "--out",
            s(&out),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        texts.push(std::fs::read_to_string(&out).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    assert!(texts[0].contains("# seed = 5"));
    assert!(texts[0].contains("# replications = 400"));
    assert!(texts[0].contains("exp,weibull,1.5;1,30,15,none,DS_W2,0.05,"));
}

#[test]
fn power_fast_overrides_and_level() {
    let dir = TempDir::new().unwrap();
    let cfg = small_config(&dir);
    let o = cgof(&[
        "power",
        "--config-file",
        s(&cfg),
        "--fast",
        "--set",
        "alternatives=gamma(2,1)",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("# replications = 2000"));
    let rows: Vec<&str> = out.lines().filter(|l| l.starts_with("exp,")).collect();
    assert_eq!(rows.len(), 5 * 2 + 1);
    assert!(rows.iter().all(|r| r.contains(",2000,")));

    let o = cgof(&["power", "--config-file", s(&cfg), "--level"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o)
        .lines()
        .filter(|l| l.starts_with("exp,"))
        .all(|l| l.starts_with("exp,exp,")));
}

#[test]
fn power_rejects_unknown_key() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "bad.cfg",
        "null = exp\nalternatives = gamma(2,1)\nreplicates = 10\n",
    );
    let o = cgof(&["power", "--config-file", s(&cfg)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("`replicates`"));
}

#[test]
fn packaged_config_parses() {
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/table1_gamma41.cfg");
    let text = std::fs::read_to_string(cfg).unwrap();
    let parsed = censored_gof::harness::StudyConfig::parse(&text).unwrap();
    assert_eq!(parsed.alternatives[0].to_string(), "gamma(4,1)");
    assert_eq!(parsed.sample_sizes, vec![40, 100]);
}

#[test]
fn process_curves_and_usage() {
    let o = cgof(&["process", "--n", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--n"));
    let o = cgof(&["process", "--n", "40", "--family", "normal(0,1)"]);
    assert_eq!(o.status.code(), Some(1));

    let dir = TempDir::new().unwrap();
    let mut texts = Vec::new();
    for threads in ["1", "2"] {
        let out = dir.path().join(format!("c{threads}.csv"));
        let o = cgof(&[
            "--threads",
            threads,
            "process",
            "--n",
            "40",
            "--B",
            "300",
            "--spacing",
            "0.05",
            "--delta",
            "0.05",
            "--seed",
            "9",
            "--out",
            s(&out),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        texts.push(std::fs::read_to_string(&out).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    let rows = censored_gof::process_lab::parse_curves(&texts[0]).unwrap();
    assert_eq!(rows.len(), 6 * 19);
    assert!(rows.iter().all(|r| r.n == 40 && r.replications == 300 && r.seed == 9));
    assert!(texts[0].contains("# identity_error"));
}

#[test]
fn help_documents_exit_codes() {
    let o = cgof(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("Exit status"));
    for c in ["gof", "critvals", "power", "process"] {
        assert!(out.contains(c));
    }
}

#[test]
fn packaged_config_reproduces_gamma_block() {
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/table1_gamma41.cfg");
    let o = cgof(&[
        "power",
        "--config-file",
        s(&cfg),
        "--fast",
        "--set",
        "n=100",
        "--set",
        "censor_fraction=0.75",
        "--set",
        "statistics=A2,C2",
        "--set",
        "transforms=MS,LHB",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let pct = |cell: &str| -> f64 {
        let prefix = format!("exp,gamma,4;1,100,75,{cell},0.05,");
        let row = out.lines().find(|l| l.starts_with(&prefix)).unwrap();
        row[prefix.len()..].split(',').next().unwrap().parse().unwrap()
    };
    for (cell, target) in [("LHB,A2", 89.0), ("LHB,C2", 93.0), ("MS,A2", 7.0)] {
        let got = pct(cell);
        assert!((got - target).abs() <= 3.0, "{cell}: {got} vs {target}");
    }
}
