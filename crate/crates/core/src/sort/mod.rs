//! Sorting under noisy comparisons.
//!
//! Building blocks first: inversion-driven insertion sort, binary insertion
//! through noisy search, their composition [`weak_sort`], and capped or
//! restart-wrapped variants. [`noisy_sort`] combines them into the pivot and
//! bucket scheme.

mod noisy;

pub use noisy::{
    noisy_sort, noisy_sort_budget, safe_noisy_sort, BucketPlan, NoisySortRun, SortParams, BUCKET_ASSIGN_TAG,
    BUCKET_SORT_TAG, PIVOT_SORT_TAG, REINSERT_TAG, SMALL_INPUT_TAG, SMALL_SORT_CUTOFF, TRIM_TAG,
};

use crate::error::{check_open_unit, Result};
use crate::oracle::{ElementId, NoisyOracle};
use crate::primitives::{f_p, less_than, restart_wrap};
use crate::search::{posterior_search, safe_binary_search, search_cost_estimate};

/// Insertion sort where every adjacent comparison is a [`less_than`] at error
/// `sigma`. With `t` inversions in the input it errs with probability at most
/// `(n - 1 + t) sigma`.
pub fn sort_inversion(oracle: &mut NoisyOracle, ids: &[ElementId], sigma: f64) -> Result<Vec<ElementId>> {
    check_open_unit("sigma", sigma, 0.5, "(0, 1/2)")?;
    let mut a = ids.to_vec();
    for i in 1..a.len() {
        for j in (1..=i).rev() {
            if less_than(oracle, a[j], a[j - 1], sigma)? {
                a.swap(j, j - 1);
            } else {
                break;
            }
        }
    }
    Ok(a)
}

/// Binary insertion sort; each insertion is a [`posterior_search`] at error
/// `delta / n`.
pub fn simple_sort(oracle: &mut NoisyOracle, ids: &[ElementId], delta: f64) -> Result<Vec<ElementId>> {
    check_open_unit("delta", delta, 1.0, "(0, 1)")?;
    let per_insert = delta / ids.len().max(1) as f64;
    let mut sorted = Vec::with_capacity(ids.len());
    for &x in ids {
        let at = if sorted.is_empty() {
            0
        } else {
            posterior_search(oracle, &sorted, x, per_insert)?.predecessor_index
        };
        sorted.insert(at, x);
    }
    Ok(sorted)
}

// simple_sort's error inside weak_sort
fn weak_pre_sort_error(n: usize) -> f64 {
    1.0 / (n as f64 * n as f64)
}

/// [`simple_sort`] at error `n^-2`, which leaves about one inversion in
/// expectation, then [`sort_inversion`] at `delta / n` to clean up.
pub fn weak_sort(oracle: &mut NoisyOracle, ids: &[ElementId], delta: f64) -> Result<Vec<ElementId>> {
    check_open_unit("delta", delta, 1.0, "(0, 1)")?;
    let n = ids.len();
    if n < 2 {
        return Ok(ids.to_vec());
    }
    let rough = simple_sort(oracle, ids, weak_pre_sort_error(n))?;
    sort_inversion(oracle, &rough, delta / n as f64)
}

/// Expected-cost estimate for [`weak_sort`], used to size its safe wrapper:
/// the searches of the pre-sort plus `n f(delta/n) + n^2 delta f(delta/n)`.
pub fn weak_sort_cost_estimate(p: f64, n: usize, delta: f64) -> Result<f64> {
    if n < 2 {
        return Ok(0.0);
    }
    let per_insert = weak_pre_sort_error(n) / n as f64;
    let searches: f64 = (1..n).map(|i| search_cost_estimate(p, i, per_insert)).sum();
    let f = f_p(p, delta / n as f64)?;
    let nf = n as f64 * f;
    Ok(searches + nf + n as f64 * delta * nf)
}

/// [`weak_sort`] under the restart wrapper.
pub fn safe_weak_sort(oracle: &mut NoisyOracle, ids: &[ElementId], delta: f64) -> Result<Vec<ElementId>> {
    check_open_unit("delta", delta, 1.0, "(0, 1)")?;
    let m = weak_sort_cost_estimate(oracle.crossover(), ids.len(), delta)?;
    restart_wrap(oracle, m, |o| weak_sort(o, ids, delta)).map(|w| w.value)
}

/// `1 / (n log2 n)`, with `log2 n` floored at 2 so the result stays below
/// 1/2 whenever there is anything to search.
pub fn inverse_n_log_n(n: usize) -> f64 {
    let n = n.max(1) as f64;
    1.0 / (n * n.log2().max(2.0))
}

/// Output of a sort that may hit a hard query cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CappedSort {
    pub order: Vec<ElementId>,
    /// The cap was reached; `order` is then the input order unchanged.
    pub overflowed: bool,
}

/// Hard cap used by [`safe_simple_sort`], `ceil(c1 n log2 n)`.
pub fn simple_sort_cap(n: usize, c1: f64) -> u64 {
    if n < 2 {
        return 0;
    }
    (c1 * n as f64 * (n as f64).log2()).ceil() as u64
}

/// Binary insertion through [`safe_binary_search`] at error `1/(n log2 n)`
/// per insertion, stopped at [`simple_sort_cap`] queries. On overflow the
/// input order is returned as is.
pub fn safe_simple_sort(oracle: &mut NoisyOracle, ids: &[ElementId], c1: f64) -> Result<CappedSort> {
    safe_simple_sort_with_error(oracle, ids, c1, inverse_n_log_n(ids.len().max(2)))
}

/// [`safe_simple_sort`] with an explicit per-insertion error.
pub fn safe_simple_sort_with_error(
    oracle: &mut NoisyOracle,
    ids: &[ElementId],
    c1: f64,
    per_insert: f64,
) -> Result<CappedSort> {
    check_open_unit("per_insert", per_insert, 0.5, "(0, 1/2)")?;
    let n = ids.len();
    let outcome = oracle.within_budget(simple_sort_cap(n, c1), |o| {
        let mut sorted = Vec::with_capacity(n);
        for &x in ids {
            let at = if sorted.is_empty() {
                0
            } else {
                safe_binary_search(o, &sorted, x, per_insert)?.predecessor_index
            };
            sorted.insert(at, x);
        }
        Ok(sorted)
    })?;
    Ok(match outcome {
        Some(order) => CappedSort {
            order,
            overflowed: false,
        },
        None => CappedSort {
            order: ids.to_vec(),
            overflowed: true,
        },
    })
}

/// Multiset equality of two id lists.
pub fn is_permutation_of(a: &[ElementId], b: &[ElementId]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

/// Number of out-of-order pairs under the hidden order. Quadratic; tests and
/// small inputs only.
pub fn inversions(oracle: &NoisyOracle, ids: &[ElementId]) -> usize {
    let mut t = 0;
    for i in 0..ids.len() {
        for j in i + 1..ids.len() {
            t += oracle.truly_less(ids[j], ids[i]) as usize;
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::attempt_budget;

    fn setup(n: usize, p: f64, seed: u64) -> (NoisyOracle, Vec<ElementId>) {
        (NoisyOracle::shuffled(n, p, seed).unwrap(), (0..n).collect())
    }

    #[test]
    fn singletons_are_free() {
        let (mut o, ids) = setup(1, 0.1, 1);
        assert_eq!(sort_inversion(&mut o, &ids, 0.01).unwrap(), ids);
        assert_eq!(simple_sort(&mut o, &ids, 0.01).unwrap(), ids);
        assert_eq!(weak_sort(&mut o, &ids, 0.01).unwrap(), ids);
        assert_eq!(safe_weak_sort(&mut o, &ids, 0.01).unwrap(), ids);
        assert_eq!(safe_simple_sort(&mut o, &ids, 5.0).unwrap().order, ids);
        assert_eq!(o.total_queries(), 0);
    }

    #[test]
    fn simple_sort_pair_runs_one_search() {
        let (mut o, ids) = setup(2, 0.1, 4);
        let out = simple_sort(&mut o, &ids, 0.05).unwrap();
        assert!(is_permutation_of(&out, &ids));
        assert!(o.total_queries() > 0);
    }

    #[test]
    fn sorted_input_cost_matches_formula() {
        // t = 0, n = 10: expected cost at most 9 f(0.01) = 33.75 plus the
        // 9 * 0.01 * 100 * 3.75 slack for the error branch
        let n = 10;
        let trials = 2000;
        let mut total = 0;
        for seed in 0..trials {
            let mut o = NoisyOracle::new((0..n).collect(), 0.1, seed).unwrap();
            let ids: Vec<_> = (0..n).collect();
            sort_inversion(&mut o, &ids, 0.01).unwrap();
            total += o.total_queries();
        }
        let mean = total as f64 / trials as f64;
        assert!(mean <= 33.75 + 9.0 * 0.01 * 100.0 * 3.75, "{mean}");
    }

    #[test]
    fn sort_inversion_small_error_rate() {
        // n = 5, sigma = 1e-4: per-trial error at most (4 + t) 1e-4 <= 1.4e-3
        let trials = 10_000;
        let mut bound = 0.0;
        let mut wrong = 0;
        for seed in 0..trials {
            let (mut o, ids) = setup(5, 0.1, seed);
            bound += (4 + inversions(&o, &ids)) as f64 * 1e-4;
            let out = sort_inversion(&mut o, &ids, 1e-4).unwrap();
            wrong += !o.is_sorted(&out) as u32;
        }
        assert!((wrong as f64) <= bound + 3.0 * bound.sqrt(), "{wrong} vs {bound}");
    }

    #[test]
    fn simple_sort_error_rate() {
        let trials = 300;
        let mut wrong = 0;
        for seed in 0..trials {
            let (mut o, ids) = setup(256, 0.1, seed);
            let out = simple_sort(&mut o, &ids, 0.05).unwrap();
            assert!(is_permutation_of(&out, &ids));
            wrong += !o.is_sorted(&out) as u32;
        }
        let sigma = (0.05f64 * 0.95 / trials as f64).sqrt();
        assert!(wrong as f64 / trials as f64 <= 0.05 + 3.0 * sigma, "{wrong}");
    }

    #[test]
    fn weak_sort_dominant_term() {
        // bucket of 36 inside an instance of 2^12: delta = 1/(N log2 N)
        let big_n = 4096.0f64;
        let delta = 1.0 / (big_n * 12.0);
        let f = f_p(0.1, delta / 36.0).unwrap();
        let steps = ((36.0 * big_n * 12.0 - 1.0f64).log2() / 9f64.log2()).ceil();
        assert!((f - steps / 0.8).abs() < 1e-12);
        assert_eq!(steps, 7.0);
    }

    #[test]
    fn safe_weak_sort_attempts_capped() {
        let n = 30;
        let delta = 1e-4;
        let m = weak_sort_cost_estimate(0.1, n, delta).unwrap();
        let k = attempt_budget(m);
        for seed in 0..50 {
            let (mut o, ids) = setup(n, 0.1, seed);
            let out = safe_weak_sort(&mut o, &ids, delta).unwrap();
            assert!(is_permutation_of(&out, &ids));
            assert!(o.total_queries() <= (o.restarts() + 1) * k);
        }
    }

    #[test]
    fn safe_simple_sort_respects_cap() {
        for seed in 0..30 {
            let (mut o, ids) = setup(100, 0.1, seed);
            // tight cap forces overflows on some seeds
            let c1 = 3.0;
            let out = safe_simple_sort(&mut o, &ids, c1).unwrap();
            assert!(o.total_queries() <= simple_sort_cap(100, c1));
            assert!(is_permutation_of(&out.order, &ids));
            if out.overflowed {
                assert_eq!(out.order, ids);
            }
        }
    }

    #[test]
    fn inverse_n_log_n_values() {
        assert!((inverse_n_log_n(1024) - 1.0 / 10240.0).abs() < 1e-18);
        assert_eq!(inverse_n_log_n(2), 0.25);
        assert_eq!(inverse_n_log_n(3), 1.0 / 6.0);
    }
}
