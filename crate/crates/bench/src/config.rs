use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    NoisySort,
    SafeNoisySort,
    WeakSort,
    SimpleSort,
    BinarySearch,
    LessThan,
    MajorityBaseline,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::NoisySort => "noisy-sort",
            Algorithm::SafeNoisySort => "safe-noisy-sort",
            Algorithm::WeakSort => "weak-sort",
            Algorithm::SimpleSort => "simple-sort",
            Algorithm::BinarySearch => "binary-search",
            Algorithm::LessThan => "less-than",
            Algorithm::MajorityBaseline => "majority-baseline",
        }
    }

    pub fn is_sort(self) -> bool {
        matches!(
            self,
            Algorithm::NoisySort | Algorithm::SafeNoisySort | Algorithm::WeakSort | Algorithm::SimpleSort
        )
    }

    // exclusive upper end of the admissible delta range
    fn delta_limit(self) -> f64 {
        match self {
            Algorithm::LessThan | Algorithm::MajorityBaseline => 0.5,
            _ => 1.0,
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One Monte Carlo experiment.
///
/// `delta` is ignored by `noisy-sort` and `safe-noisy-sort`, which fix their
/// internal error targets. `c1` and `c2` only matter to the sorts that use
/// hard caps. `n` is ignored by `less-than` and `majority-baseline`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub algorithm: Algorithm,
    pub n: usize,
    pub p: f64,
    pub delta: f64,
    pub trials: u64,
    pub seed: u64,
    pub c1: f64,
    pub c2: f64,
    /// Worker threads; 0 lets rayon decide. Never affects results.
    #[serde(skip)]
    pub parallel: usize,
}

impl BenchConfig {
    /// Config with calibrated `c1`, `c2` for `p`.
    pub fn new(algorithm: Algorithm, n: usize, p: f64, delta: f64, trials: u64, seed: u64) -> Self {
        let params = noisysort::sort::SortParams::calibrated(p);
        Self {
            algorithm,
            n,
            p,
            delta,
            trials,
            seed,
            c1: params.c1,
            c2: params.c2,
            parallel: 0,
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |msg: String| Err(BenchError::InvalidConfig(msg));
        if self.trials < 1 {
            return bad("trials must be at least 1".into());
        }
        if self.n < 1 {
            return bad("n must be at least 1".into());
        }
        if !(self.p > 0.0 && self.p < 0.5) {
            return bad(format!("p = {} is outside (0, 1/2)", self.p));
        }
        let limit = self.algorithm.delta_limit();
        if !(self.delta > 0.0 && self.delta < limit) {
            return bad(format!(
                "delta = {} is outside (0, {limit}) for {}",
                self.delta, self.algorithm
            ));
        }
        if !(self.c1 > 0.0 && self.c1.is_finite() && self.c2 > 0.0 && self.c2.is_finite()) {
            return bad("c1 and c2 must be positive and finite".into());
        }
        Ok(())
    }
}
