//! Pairwise comparison under noise.

use crate::error::{check_open_unit, NoisyError, Result};
use crate::oracle::{ElementId, NoisyOracle};
use crate::primitives::constants::{f_p, log_odds_step, threshold_steps};
use crate::primitives::restart::restart_wrap;

/// Posterior that `x < y` after a run of queries, kept as integer counts.
///
/// Starting from a symmetric prior every answer moves the log-odds by exactly
/// `±log((1-p)/p)`, so the net count is all the state there is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorOdds {
    pub steps_up: u64,
    pub steps_down: u64,
    pub p: f64,
}

impl PosteriorOdds {
    pub fn new(p: f64) -> Self {
        Self {
            steps_up: 0,
            steps_down: 0,
            p,
        }
    }

    pub fn observe(&mut self, said_less: bool) {
        if said_less {
            self.steps_up += 1;
        } else {
            self.steps_down += 1;
        }
    }

    pub fn net(&self) -> i64 {
        self.steps_up as i64 - self.steps_down as i64
    }

    pub fn queries(&self) -> u64 {
        self.steps_up + self.steps_down
    }

    /// Log-odds `log2(a / (1 - a))` in bits.
    pub fn log_odds_bits(&self) -> f64 {
        self.net() as f64 * log_odds_step(self.p)
    }

    /// The posterior probability `a` that `x < y`.
    pub fn posterior(&self) -> f64 {
        let z = self.net() as f64 * ((1.0 - self.p) / self.p).ln();
        1.0 / (1.0 + (-z).exp())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LessThanRun {
    pub verdict: bool,
    pub odds: PosteriorOdds,
}

fn check_pair_delta(delta: f64) -> Result<()> {
    check_open_unit("delta", delta, 0.5, "(0, 1/2)")
}

/// Sequential posterior test of `x < y` with error at most `delta`, keeping
/// the full trace.
pub fn less_than_run(oracle: &mut NoisyOracle, x: ElementId, y: ElementId, delta: f64) -> Result<LessThanRun> {
    check_pair_delta(delta)?;
    let p = oracle.crossover();
    // a >= 1 - delta  <=>  net >= threshold, and symmetrically below
    let threshold = threshold_steps(p, delta)?;
    let mut odds = PosteriorOdds::new(p);
    loop {
        odds.observe(oracle.query(x, y)?);
        if odds.net() >= threshold {
            return Ok(LessThanRun { verdict: true, odds });
        }
        if odds.net() <= -threshold {
            return Ok(LessThanRun { verdict: false, odds });
        }
    }
}

pub fn less_than(oracle: &mut NoisyOracle, x: ElementId, y: ElementId, delta: f64) -> Result<bool> {
    less_than_run(oracle, x, y, delta).map(|run| run.verdict)
}

/// [`less_than`] under the restart wrapper, so no single attempt exceeds
/// `ceil(m log2 m)` queries with `m = f_p(delta)`.
pub fn safe_less_than(oracle: &mut NoisyOracle, x: ElementId, y: ElementId, delta: f64) -> Result<bool> {
    check_pair_delta(delta)?;
    let m = f_p(oracle.crossover(), delta)?;
    restart_wrap(oracle, m, |o| less_than(o, x, y, delta)).map(|w| w.value)
}

/// Majority of `t` independent queries. Baseline only.
pub fn majority_compare(oracle: &mut NoisyOracle, x: ElementId, y: ElementId, t: usize) -> Result<bool> {
    if t.is_multiple_of(2) {
        return Err(NoisyError::EvenRepetitions(t));
    }
    let mut yes = 0;
    for _ in 0..t {
        if oracle.query(x, y)? {
            yes += 1;
        }
    }
    Ok(2 * yes > t)
}

/// Exact error of [`majority_compare`]: `P[Binomial(t, p) > t/2]`.
pub fn majority_error(p: f64, t: usize) -> f64 {
    // pmf by recurrence, avoiding factorial overflow
    let q = 1.0 - p;
    let mut pmf = q.powi(t as i32);
    let mut tail = 0.0;
    for k in 0..=t {
        if k > 0 {
            pmf *= (t - k + 1) as f64 / k as f64 * (p / q);
        }
        if 2 * k > t {
            tail += pmf;
        }
    }
    tail
}

/// Smallest odd `t` whose majority error is at most `delta`.
pub fn majority_repetitions(p: f64, delta: f64) -> usize {
    let mut t = 1;
    while majority_error(p, t) > delta {
        t += 2;
    }
    t
}
