//! Closed-form channel constants. All logarithms are base 2.

use crate::error::{check_crossover, check_open_unit, Result};

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// BSC capacity `1 - h(p)` in bits per query.
pub fn capacity(p: f64) -> f64 {
    1.0 - binary_entropy(p)
}

/// `log2((1-p)/p)`: one step of the LessThan log-odds walk, in bits.
pub fn log_odds_step(p: f64) -> f64 {
    ((1.0 - p) / p).log2()
}

/// Expected log-odds gain per query, `(1-2p) log2((1-p)/p)`.
pub fn walk_rate(p: f64) -> f64 {
    (1.0 - 2.0 * p) * log_odds_step(p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantsRecord {
    pub p: f64,
    pub h_p: f64,
    pub capacity: f64,
    pub walk_rate: f64,
    /// Leading constant of the optimal noisy sort, `1/I(p) + 1/walk_rate`.
    pub sort_constant: f64,
    /// Information-only lower constant `1/I(p)`.
    pub lower_only: f64,
    /// Previous best upper constant `2 / log2(1 / (1/2 + sqrt(p(1-p))))`.
    pub prior_upper: f64,
}

pub fn constants(p: f64) -> Result<ConstantsRecord> {
    check_crossover(p)?;
    let h_p = binary_entropy(p);
    let capacity = 1.0 - h_p;
    let walk_rate = walk_rate(p);
    Ok(ConstantsRecord {
        p,
        h_p,
        capacity,
        walk_rate,
        sort_constant: 1.0 / capacity + 1.0 / walk_rate,
        lower_only: 1.0 / capacity,
        prior_upper: 2.0 / (1.0 / (0.5 + (p * (1.0 - p)).sqrt())).log2(),
    })
}

// Ratios within this distance of an integer are treated as that integer, so
// e.g. delta = p (ratio exactly 1) does not round up to 2 through float noise.
const CEIL_SLACK: f64 = 1e-9;

pub(crate) fn ceil_tolerant(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < CEIL_SLACK {
        r
    } else {
        x.ceil()
    }
}

/// `ceil(log((1-delta)/delta) / log((1-p)/p))`: how many net agreeing answers
/// LessThan needs before it may stop.
pub fn threshold_steps(p: f64, delta: f64) -> Result<i64> {
    check_crossover(p)?;
    check_open_unit("delta", delta, 1.0, "(0, 1)")?;
    Ok(ceil_tolerant(((1.0 - delta) / delta).log2() / log_odds_step(p)) as i64)
}

/// Bound on the expected number of queries of LessThan at error `delta`:
/// `ceil(log((1-delta)/delta) / log((1-p)/p)) / (1-2p)`.
pub fn f_p(p: f64, delta: f64) -> Result<f64> {
    Ok(threshold_steps(p, delta)? as f64 / (1.0 - 2.0 * p))
}

/// Lower-bound expression for noisy binary search:
/// `(1-delta) log2 n / I(p) + 2 log2(1/delta) / walk_rate`.
pub fn search_bound(p: f64, delta: f64, n: usize) -> Result<f64> {
    check_crossover(p)?;
    check_open_unit("delta", delta, 1.0, "(0, 1)")?;
    Ok(search_floor(p, delta, n) + 2.0 * (1.0 / delta).log2() / walk_rate(p))
}

/// Information-theoretic part only, `(1-delta) log2 n / I(p)`.
pub fn search_floor(p: f64, delta: f64, n: usize) -> f64 {
    (1.0 - delta) * (n.max(1) as f64).log2() / capacity(p)
}
