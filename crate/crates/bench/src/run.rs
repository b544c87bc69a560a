use std::collections::BTreeMap;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use noisysort::primitives::{f_p, less_than_run, majority_compare, majority_repetitions, search_bound};
use noisysort::search::{noisy_binary_search, true_predecessor};
use noisysort::sort::{noisy_sort, safe_noisy_sort, simple_sort, weak_sort, SortParams};
use noisysort::{ElementId, NoisyOracle};

use crate::{Algorithm, BenchConfig, BenchError};

/// Outcome of one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub index: u64,
    pub seed: u64,
    pub n: usize,
    pub p: f64,
    pub delta: f64,
    pub algorithm: Algorithm,
    pub correct: bool,
    pub queries_total: u64,
    pub queries_by_tag: BTreeMap<String, u64>,
    pub restarts: u64,
    pub c1: f64,
    pub c2: f64,
    /// Informational; the only field not fixed by the config.
    pub wall_nanos: u64,
}

/// One CSV row. Field order is the emitted column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub algorithm: Algorithm,
    pub n: usize,
    pub p: f64,
    pub delta: f64,
    pub trials: u64,
    pub error_rate: f64,
    pub error_ci_lo: f64,
    pub error_ci_hi: f64,
    pub mean_queries: f64,
    pub std_queries: f64,
    pub p95_queries: f64,
    pub ratio_nlogn: f64,
    pub mean_restarts: f64,
    pub seed: u64,
    pub c1: f64,
    pub c2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub row: AggregateRow,
    /// Mean queries per trial charged to each tag.
    pub per_tag_means: BTreeMap<String, f64>,
    /// In trial-index order.
    pub per_trial: Vec<TrialReport>,
    /// Denominator of `ratio_nlogn`.
    pub normalizer: f64,
}

impl Aggregate {
    /// Mean queries of `tag` over the same normalizer as `ratio_nlogn`.
    pub fn tag_ratio(&self, tag: &str) -> f64 {
        self.per_tag_means.get(tag).copied().unwrap_or(0.0) / self.normalizer
    }
}

/// Seed of trial `index`, from stream `index` of the master seed.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng.next_u64()
}

/// Runs every trial of `config` and aggregates them.
pub fn run_trials(config: &BenchConfig) -> Result<Aggregate, BenchError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallel)
        .build()
        .map_err(|e| BenchError::InvalidConfig(e.to_string()))?;
    let reports: Vec<TrialReport> = pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|i| run_trial(config, i))
            .collect::<Result<_, _>>()
    })?;
    Ok(aggregate(config, reports))
}

/// One trial on a fresh oracle whose hidden order is a uniformly random
/// permutation.
pub fn run_trial(config: &BenchConfig, index: u64) -> Result<TrialReport, BenchError> {
    let seed = trial_seed(config.seed, index);
    let started = Instant::now();
    let (oracle, correct) = match config.algorithm {
        Algorithm::BinarySearch => {
            // n + 1 elements; id 0 is the target, so its rank is uniform on 0..=n
            let mut o = NoisyOracle::shuffled(config.n + 1, config.p, seed)?;
            let list: Vec<ElementId> = o.sorted_ids().into_iter().filter(|&id| id != 0).collect();
            let found = noisy_binary_search(&mut o, &list, 0, config.delta)?;
            let correct = found.predecessor_index == true_predecessor(&o, &list, 0);
            (o, correct)
        }
        Algorithm::LessThan | Algorithm::MajorityBaseline => {
            let mut o = NoisyOracle::shuffled(2, config.p, seed)?;
            let verdict = if config.algorithm == Algorithm::LessThan {
                less_than_run(&mut o, 0, 1, config.delta)?.verdict
            } else {
                majority_compare(&mut o, 0, 1, majority_repetitions(config.p, config.delta))?
            };
            let correct = verdict == o.truly_less(0, 1);
            (o, correct)
        }
        sort => {
            let mut o = NoisyOracle::shuffled(config.n, config.p, seed)?;
            let ids: Vec<ElementId> = (0..config.n).collect();
            let params = SortParams {
                c1: config.c1,
                c2: config.c2,
            };
            let order = match sort {
                Algorithm::NoisySort => noisy_sort(&mut o, &ids, &params)?.order,
                Algorithm::SafeNoisySort => safe_noisy_sort(&mut o, &ids, &params)?.order,
                Algorithm::WeakSort => weak_sort(&mut o, &ids, config.delta)?,
                _ => simple_sort(&mut o, &ids, config.delta)?,
            };
            let correct = o.is_sorted(&order);
            (o, correct)
        }
    };
    let wall_nanos = started.elapsed().as_nanos() as u64;
    let ledger = oracle.ledger_snapshot();
    Ok(TrialReport {
        index,
        seed,
        n: config.n,
        p: config.p,
        delta: config.delta,
        algorithm: config.algorithm,
        correct,
        queries_total: ledger.total,
        queries_by_tag: ledger.by_tag,
        restarts: oracle.restarts(),
        c1: config.c1,
        c2: config.c2,
        wall_nanos,
    })
}

/// Denominator of `ratio_nlogn`: `n log2 n` for sorts, the search bound for
/// binary search, `f_p(delta)` for the pairwise tests.
pub fn normalizer(config: &BenchConfig) -> f64 {
    let n = config.n as f64;
    let value = match config.algorithm {
        a if a.is_sort() => n * n.log2(),
        Algorithm::BinarySearch => search_bound(config.p, config.delta, config.n).unwrap_or(0.0),
        _ => f_p(config.p, config.delta).unwrap_or(0.0),
    };
    if value > 0.0 {
        value
    } else {
        1.0
    }
}

const WILSON_Z: f64 = 1.959_963_984_540_054;

/// Wilson score interval at 95% for `k` successes in `t` trials.
pub fn wilson_interval(k: u64, t: u64) -> (f64, f64) {
    let (lo, hi) = wilson_raw(k as f64, t as f64);
    // the closed ends are exact; rounding would otherwise leave ~1e-19
    (if k == 0 { 0.0 } else { lo }, if k == t { 1.0 } else { hi })
}

fn wilson_raw(k: f64, t: f64) -> (f64, f64) {
    let z2 = WILSON_Z * WILSON_Z;
    let phat = k / t;
    let centre = (phat + z2 / (2.0 * t)) / (1.0 + z2 / t);
    let half = WILSON_Z / (1.0 + z2 / t) * (phat * (1.0 - phat) / t + z2 / (4.0 * t * t)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Aggregates reports of `config`. Only integer sums and an order statistic
/// are taken, so the result does not depend on the order of `reports`;
/// `per_trial` is stored sorted by index.
pub fn aggregate(config: &BenchConfig, mut reports: Vec<TrialReport>) -> Aggregate {
    reports.sort_by_key(|r| r.index);
    let t = reports.len() as u64;
    let errors = reports.iter().filter(|r| !r.correct).count() as u64;
    let sum: u128 = reports.iter().map(|r| r.queries_total as u128).sum();
    let sum_sq: u128 = reports.iter().map(|r| (r.queries_total as u128).pow(2)).sum();
    let restarts: u64 = reports.iter().map(|r| r.restarts).sum();

    let tf = t as f64;
    let mean = sum as f64 / tf;
    let std = if t > 1 {
        // exact integer numerator: t * sum_sq - sum^2
        let num = (t as u128 * sum_sq - sum * sum) as f64;
        (num / (tf * (tf - 1.0))).sqrt()
    } else {
        0.0
    };
    let mut sorted: Vec<u64> = reports.iter().map(|r| r.queries_total).collect();
    sorted.sort_unstable();
    let rank = ((0.95 * tf).ceil() as usize).clamp(1, sorted.len());
    let p95 = sorted[rank - 1] as f64;

    let mut tag_sums: BTreeMap<String, u64> = BTreeMap::new();
    for r in &reports {
        for (tag, &q) in &r.queries_by_tag {
            *tag_sums.entry(tag.clone()).or_default() += q;
        }
    }
    let per_tag_means = tag_sums.into_iter().map(|(k, v)| (k, v as f64 / tf)).collect();

    let (lo, hi) = wilson_interval(errors, t);
    let norm = normalizer(config);
    Aggregate {
        row: AggregateRow {
            algorithm: config.algorithm,
            n: config.n,
            p: config.p,
            delta: config.delta,
            trials: t,
            error_rate: errors as f64 / tf,
            error_ci_lo: lo,
            error_ci_hi: hi,
            mean_queries: mean,
            std_queries: std,
            p95_queries: p95,
            ratio_nlogn: mean / norm,
            mean_restarts: restarts as f64 / tf,
            seed: config.seed,
            c1: config.c1,
            c2: config.c2,
        },
        per_tag_means,
        per_trial: reports,
        normalizer: norm,
    }
}
