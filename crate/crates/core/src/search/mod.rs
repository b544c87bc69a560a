//! Noisy binary search for the predecessor of a target in a sorted list.

mod posterior;

pub use posterior::GapPosterior;

use rand::Rng;

use crate::error::{check_open_unit, Result};
use crate::oracle::{ElementId, NoisyOracle};
use crate::primitives::{capacity, less_than, restart_wrap};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOutcome {
    /// Number of list elements below the target: 0 means below everything,
    /// `i` means the predecessor is `sorted[i - 1]`.
    pub predecessor_index: usize,
    pub queries_used: u64,
    pub restarts: u64,
}

/// Analytic expected-cost estimate used to size the safe wrapper's cap,
/// `(log2 n + log2(1/delta)) / I(p)`.
pub fn search_cost_estimate(p: f64, n: usize, delta: f64) -> f64 {
    ((n.max(1) as f64).log2() + (1.0 / delta).log2()) / capacity(p)
}

/// `1/log2 n`, with `log2 n` floored at 4 (the analysis pads tiny lists).
pub(crate) fn inverse_log(n: usize) -> f64 {
    1.0 / (n.max(1) as f64).log2().max(4.0)
}

/// Bayesian gap search: query the target against the element splitting the
/// posterior mass most evenly until one gap holds at least `1 - delta`.
pub fn posterior_search(
    oracle: &mut NoisyOracle,
    sorted: &[ElementId],
    x: ElementId,
    delta: f64,
) -> Result<SearchOutcome> {
    check_open_unit("delta", delta, 0.5, "(0, 1/2)")?;
    let start = oracle.total_queries();
    let mut posterior = GapPosterior::uniform(sorted.len(), oracle.crossover());
    loop {
        let (gap, mass) = posterior.most_likely();
        if mass >= 1.0 - delta {
            return Ok(SearchOutcome {
                predecessor_index: gap,
                queries_used: oracle.total_queries() - start,
                restarts: 0,
            });
        }
        let split = posterior.median_split();
        let below = oracle.query(x, sorted[split - 1])?;
        posterior.update(split, below);
        debug_assert!((posterior.total_mass() - 1.0).abs() < 1e-9);
    }
}

/// [`posterior_search`] under the restart wrapper.
pub fn safe_binary_search(
    oracle: &mut NoisyOracle,
    sorted: &[ElementId],
    x: ElementId,
    delta: f64,
) -> Result<SearchOutcome> {
    check_open_unit("delta", delta, 0.5, "(0, 1/2)")?;
    let start = oracle.total_queries();
    let m = search_cost_estimate(oracle.crossover(), sorted.len(), delta);
    let wrapped = restart_wrap(oracle, m, |o| posterior_search(o, sorted, x, delta))?;
    Ok(SearchOutcome {
        predecessor_index: wrapped.value.predecessor_index,
        queries_used: oracle.total_queries() - start,
        restarts: wrapped.restarts,
    })
}

/// Search with error `delta` whose cost splits into `(1-delta) log2 n / I(p)`
/// for locating a candidate and `2 log2(1/delta) / ((1-2p) log2((1-p)/p))`
/// for confirming it.
///
/// A candidate predecessor `l` is found with error `1/log2 n`, then
/// `l < x` and `x < r` are each confirmed at error `delta/4`, `r` being the
/// next element. Comparisons against the virtual `-inf`/`+inf` ends succeed
/// without a query. Any failed confirmation restarts the loop.
///
/// When `delta > 1/log2 n` no confirmation is needed: with probability
/// `delta - 1/log2 n` the search gives up and answers gap 0, otherwise it
/// returns the candidate directly.
pub fn noisy_binary_search(
    oracle: &mut NoisyOracle,
    sorted: &[ElementId],
    x: ElementId,
    delta: f64,
) -> Result<SearchOutcome> {
    check_open_unit("delta", delta, 1.0, "(0, 1)")?;
    let n = sorted.len();
    let start = oracle.total_queries();
    let done = |oracle: &NoisyOracle, gap, restarts| SearchOutcome {
        predecessor_index: gap,
        queries_used: oracle.total_queries() - start,
        restarts,
    };
    if n == 0 {
        return Ok(done(oracle, 0, 0));
    }
    let candidate_error = inverse_log(n);
    if delta > candidate_error {
        if oracle.coins().gen_bool(delta - candidate_error) {
            return Ok(done(oracle, 0, 0));
        }
        let found = posterior_search(oracle, sorted, x, candidate_error)?;
        return Ok(done(oracle, found.predecessor_index, 0));
    }
    let mut restarts = 0;
    loop {
        let l = posterior_search(oracle, sorted, x, candidate_error)?.predecessor_index;
        let above_l = l == 0 || less_than(oracle, sorted[l - 1], x, delta / 4.0)?;
        let below_r = above_l && (l == n || less_than(oracle, x, sorted[l], delta / 4.0)?);
        if below_r {
            return Ok(done(oracle, l, restarts));
        }
        restarts += 1;
        oracle.note_restart();
    }
}

/// Correct answer, from the hidden order. For scoring only.
pub fn true_predecessor(oracle: &NoisyOracle, sorted: &[ElementId], x: ElementId) -> usize {
    sorted.partition_point(|&a| oracle.truly_less(a, x))
}
