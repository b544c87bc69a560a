use std::process::Command;

use noisysort_bench::{
    aggregate, emit, emit_to_writer, read_csv, report_constants, run_trials, Algorithm, BenchConfig, Format, CSV_HEADER,
};

fn config(algorithm: Algorithm, n: usize, trials: u64) -> BenchConfig {
    BenchConfig::new(algorithm, n, 0.1, 0.05, trials, 42)
}

fn csv_bytes(c: &BenchConfig) -> Vec<u8> {
    let mut out = Vec::new();
    emit_to_writer(&[run_trials(c).unwrap()], Format::Csv, false, &mut out).unwrap();
    out
}

fn json_without_wall_time(c: &BenchConfig) -> serde_json::Value {
    let mut out = Vec::new();
    emit_to_writer(&[run_trials(c).unwrap()], Format::Json, true, &mut out).unwrap();
    let mut v: serde_json::Value = serde_json::from_slice(&out).unwrap();
    for t in v[0]["per_trial"].as_array_mut().unwrap() {
        t["wall_nanos"] = 0.into();
    }
    v
}

#[test]
fn single_trial_is_reproducible() {
    for algorithm in [Algorithm::SafeNoisySort, Algorithm::BinarySearch, Algorithm::LessThan] {
        let c = config(algorithm, 300, 1);
        assert_eq!(csv_bytes(&c), csv_bytes(&c));
        assert_eq!(json_without_wall_time(&c), json_without_wall_time(&c));
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let mut c = config(Algorithm::NoisySort, 200, 24);
    c.parallel = 1;
    let one = json_without_wall_time(&c);
    c.parallel = 4;
    assert_eq!(one, json_without_wall_time(&c));
}

#[test]
fn aggregation_ignores_report_order() {
    let c = config(Algorithm::WeakSort, 40, 30);
    let agg = run_trials(&c).unwrap();
    let mut shuffled = agg.per_trial.clone();
    shuffled.reverse();
    shuffled.swap(3, 17);
    let again = aggregate(&c, shuffled);
    assert_eq!(again.row, agg.row);
    assert_eq!(again.per_tag_means, agg.per_tag_means);
}

#[test]
fn per_trial_queries_add_up() {
    let agg = run_trials(&config(Algorithm::NoisySort, 150, 10)).unwrap();
    for t in &agg.per_trial {
        assert_eq!(t.queries_by_tag.values().sum::<u64>(), t.queries_total);
    }
}

#[test]
fn csv_schema_and_round_trip() {
    let aggs: Vec<_> = [Algorithm::SimpleSort, Algorithm::MajorityBaseline]
        .into_iter()
        .map(|a| run_trials(&config(a, 64, 20)).unwrap())
        .collect();
    let mut out = Vec::new();
    emit_to_writer(&aggs[..1], Format::Csv, false, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], CSV_HEADER);

    let mut out = Vec::new();
    emit_to_writer(&aggs, Format::Csv, false, &mut out).unwrap();
    let rows = read_csv(out.as_slice()).unwrap();
    assert_eq!(rows.len(), 2);
    for (row, agg) in rows.iter().zip(&aggs) {
        assert_eq!(row, &agg.row);
    }
}

#[test]
fn json_per_trial_length() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let agg = run_trials(&config(Algorithm::BinarySearch, 500, 37)).unwrap();
    emit(std::slice::from_ref(&agg), Format::Json, true, &path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v[0]["per_trial"].as_array().unwrap().len(), 37);
    assert_eq!(v[0]["trials"], 37);
    assert_eq!(v[0]["algorithm"], "binary-search");

    emit(&[agg], Format::Json, false, &path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v[0].get("per_trial").is_none());
}

#[test]
fn less_than_meets_its_bounds() {
    let agg = run_trials(&BenchConfig::new(Algorithm::LessThan, 2, 0.1, 0.05, 10_000, 9)).unwrap();
    let sigma = (0.05f64 * 0.95 / 10_000.0).sqrt();
    assert!(agg.row.error_rate <= 0.05 + 3.0 * sigma);
    assert!(agg.row.mean_queries <= 2.5 * 1.05, "{}", agg.row.mean_queries);
    assert!(agg.row.error_ci_lo <= agg.row.error_rate && agg.row.error_rate <= agg.row.error_ci_hi);
}

#[test]
fn safe_noisy_sort_ratio_below_prior_bound() {
    let agg = run_trials(&config(Algorithm::SafeNoisySort, 4096, 100)).unwrap();
    assert!(agg.row.ratio_nlogn > 0.0 && agg.row.ratio_nlogn < 6.21257);
}

#[test]
fn invalid_configs_are_rejected() {
    let good = config(Algorithm::LessThan, 2, 5);
    let bad = [
        BenchConfig { trials: 0, ..good },
        BenchConfig { n: 0, ..good },
        BenchConfig { p: 0.5, ..good },
        BenchConfig { delta: 0.5, ..good },
        BenchConfig { c2: -1.0, ..good },
    ];
    for c in bad {
        let err = run_trials(&c).unwrap_err();
        assert_eq!(err.exit_code(), 2, "{c:?}");
    }
    assert!(run_trials(&BenchConfig {
        delta: 0.5,
        ..config(Algorithm::BinarySearch, 8, 5)
    })
    .is_ok());
}

#[test]
fn constants_report_lists_every_value() {
    let text = report_constants(0.1, 0.01, 1 << 16).unwrap();
    for key in [
        "h_p",
        "capacity",
        "lower_only",
        "sort_constant",
        "prior_upper",
        "search_bound",
    ] {
        assert!(text.lines().any(|l| l.starts_with(&format!("{key}="))), "{key}");
    }
    assert!(report_constants(0.1, 1.0, 16).is_err());
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_noisysort"))
}

#[test]
fn cli_exit_codes() {
    let ok = cli()
        .args(["bench", "--algorithm", "less-than", "--trials", "3"])
        .output()
        .unwrap();
    assert!(ok.status.success());
    let text = String::from_utf8(ok.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER);

    let usage = cli().args(["bench", "--algorithm", "quicksort"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
    let domain = cli()
        .args(["bench", "--algorithm", "less-than", "--p", "0.7"])
        .output()
        .unwrap();
    assert_eq!(domain.status.code(), Some(2));
    let io = cli()
        .args([
            "bench",
            "--algorithm",
            "less-than",
            "--trials",
            "2",
            "--out",
            "/nonexistent/dir/x.csv",
        ])
        .output()
        .unwrap();
    assert_eq!(io.status.code(), Some(1));
}

#[test]
fn cli_sweep_is_a_cross_product() {
    let out = cli()
        .args([
            "sweep",
            "--algorithm",
            "binary-search",
            "--n",
            "16,64,256",
            "--p",
            "0.1,0.2",
            "--delta",
            "0.05",
            "--trials",
            "5",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let rows = read_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.trials == 5));
}
