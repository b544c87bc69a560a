use rand::Rng;

use crate::error::Result;
use crate::oracle::{ElementId, NoisyOracle};
use crate::primitives::{capacity, constants, safe_less_than};
use crate::search::safe_binary_search;
use crate::sort::{inverse_n_log_n, safe_simple_sort_with_error, safe_weak_sort, weak_sort};

pub const PIVOT_SORT_TAG: &str = "pivot-sort";
pub const BUCKET_ASSIGN_TAG: &str = "bucket-assign";
pub const BUCKET_SORT_TAG: &str = "bucket-sort";
pub const TRIM_TAG: &str = "trim";
pub const REINSERT_TAG: &str = "reinsert";
pub const SMALL_INPUT_TAG: &str = "small-input";

/// Below this size [`noisy_sort`] hands the whole input to `weak_sort`:
/// sampling pivots at rate `1/log2 n` would pick most of a tiny input.
pub const SMALL_SORT_CUTOFF: usize = 64;

/// Calibration constants for the hard query caps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SortParams {
    /// Pivot sort cap is `c1 n log2 n` queries.
    pub c1: f64,
    /// Whole-sort cap is `c2 * sort_constant(p) * n log2 n` queries.
    pub c2: f64,
}

impl SortParams {
    /// Defaults calibrated at p = 0.1, where neither cap fired in calibration
    /// runs for n from 64 to 2^12. `c1` scales with `1/I(p)` because the
    /// pivot sort is search-bound.
    pub fn calibrated(p: f64) -> Self {
        Self {
            c1: 4.0 / capacity(p),
            c2: 2.0,
        }
    }
}

/// How [`noisy_sort`] partitioned its input.
#[derive(Debug, Clone, PartialEq)]
pub struct BucketPlan {
    /// Sampled pivots in their sorted order. The `-inf`/`+inf` ends are
    /// implicit: bucket `g` lies between `pivots[g - 1]` and `pivots[g]`.
    pub pivots: Vec<ElementId>,
    /// Elements kept in a bucket through trimming, with their bucket.
    pub assignments: Vec<(ElementId, usize)>,
    /// Elements deferred to one-by-one reinsertion: members of oversized
    /// buckets and everything trimmed off a bucket's ends.
    pub overflow: Vec<ElementId>,
    /// Size of every bucket handed to the weak sort.
    pub weak_sorted_sizes: Vec<usize>,
    /// Buckets above this many elements skip the weak sort entirely.
    pub size_threshold: f64,
}

impl BucketPlan {
    /// Every input id is exactly one of pivot, retained, or overflow.
    pub fn partitions(&self, ids: &[ElementId]) -> bool {
        let mut all: Vec<ElementId> = self
            .pivots
            .iter()
            .chain(self.assignments.iter().map(|(id, _)| id))
            .chain(&self.overflow)
            .copied()
            .collect();
        all.sort_unstable();
        let mut want = ids.to_vec();
        want.sort_unstable();
        all == want
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoisySortRun {
    pub order: Vec<ElementId>,
    /// `None` when the input was below [`SMALL_SORT_CUTOFF`].
    pub plan: Option<BucketPlan>,
    /// Set only by [`safe_noisy_sort`] when its budget ran out; `order` is
    /// then the input order.
    pub overflowed: bool,
}

/// Pivot-and-bucket noisy sort.
///
/// 1. Each element becomes a pivot with probability `1/log2 n`.
/// 2. Pivots are sorted by `safe_simple_sort`, each insertion at error
///    `1/(n log2 n)` with `n` the full input size.
/// 3. Every other element is located among the pivots by a safe binary
///    search at error `1/log2 n`.
/// 4. Buckets larger than `6 log2^2 n` go straight to the overflow set.
/// 5. Other buckets are weak-sorted at error `1/(n log2 n)`, then elements
///    at the front that test below the left pivot, and at the back that test
///    above the right pivot, are moved to the overflow set.
/// 6. Surviving buckets are spliced between their pivots and the overflow
///    set is reinserted by safe binary search at error `1/(n log2 n)`.
///
/// Queries are charged to the phase tags exported by this module.
pub fn noisy_sort(oracle: &mut NoisyOracle, ids: &[ElementId], params: &SortParams) -> Result<NoisySortRun> {
    let n = ids.len();
    if n < SMALL_SORT_CUTOFF {
        let delta = if n < 2 { 0.5 } else { (1.0 / (n as f64).log2()).min(0.5) };
        let order = oracle.tagged(SMALL_INPUT_TAG, |o| weak_sort(o, ids, delta))?;
        return Ok(NoisySortRun {
            order,
            plan: None,
            overflowed: false,
        });
    }

    let log_n = (n as f64).log2();
    let sample_rate = 1.0 / log_n;
    let tiny = inverse_n_log_n(n);

    let mut sampled = Vec::new();
    let mut rest = Vec::with_capacity(n);
    for &a in ids {
        if oracle.coins().gen_bool(sample_rate) {
            sampled.push(a);
        } else {
            rest.push(a);
        }
    }

    let pivots = oracle
        .tagged(PIVOT_SORT_TAG, |o| {
            safe_simple_sort_with_error(o, &sampled, params.c1, tiny)
        })?
        .order;

    let mut buckets: Vec<Vec<ElementId>> = vec![Vec::new(); pivots.len() + 1];
    oracle.tagged(BUCKET_ASSIGN_TAG, |o| -> Result<()> {
        for &a in &rest {
            let gap = safe_binary_search(o, &pivots, a, sample_rate)?.predecessor_index;
            buckets[gap].push(a);
        }
        Ok(())
    })?;

    let size_threshold = 6.0 * log_n * log_n;
    let mut overflow = Vec::new();
    let mut weak_sorted_sizes = Vec::new();
    let mut retained: Vec<Vec<ElementId>> = Vec::with_capacity(buckets.len());
    for (gap, bucket) in buckets.into_iter().enumerate() {
        if bucket.len() as f64 > size_threshold {
            overflow.extend(bucket);
            retained.push(Vec::new());
            continue;
        }
        weak_sorted_sizes.push(bucket.len());
        let sorted = oracle.tagged(BUCKET_SORT_TAG, |o| safe_weak_sort(o, &bucket, tiny))?;

        let left = gap.checked_sub(1).map(|g| pivots[g]);
        let right = pivots.get(gap).copied();
        let (front, back) = oracle.tagged(TRIM_TAG, |o| -> Result<(usize, usize)> {
            let mut front = 0;
            if let Some(l) = left {
                while front < sorted.len() && safe_less_than(o, sorted[front], l, tiny)? {
                    overflow.push(sorted[front]);
                    front += 1;
                }
            }
            let mut back = sorted.len();
            if let Some(r) = right {
                while back > front && safe_less_than(o, r, sorted[back - 1], tiny)? {
                    overflow.push(sorted[back - 1]);
                    back -= 1;
                }
            }
            Ok((front, back))
        })?;
        retained.push(sorted[front..back].to_vec());
    }

    let mut assignments = Vec::new();
    let mut order = Vec::with_capacity(n);
    for (gap, bucket) in retained.iter().enumerate() {
        assignments.extend(bucket.iter().map(|&id| (id, gap)));
        order.extend_from_slice(bucket);
        if let Some(&pivot) = pivots.get(gap) {
            order.push(pivot);
        }
    }

    oracle.tagged(REINSERT_TAG, |o| -> Result<()> {
        for &x in &overflow {
            let at = safe_binary_search(o, &order, x, tiny)?.predecessor_index;
            order.insert(at, x);
        }
        Ok(())
    })?;

    Ok(NoisySortRun {
        order,
        plan: Some(BucketPlan {
            pivots,
            assignments,
            overflow,
            weak_sorted_sizes,
            size_threshold,
        }),
        overflowed: false,
    })
}

/// Hard cap used by [`safe_noisy_sort`], `ceil(c2 * sort_constant * n log2 n)`.
pub fn noisy_sort_budget(p: f64, n: usize, c2: f64) -> Result<u64> {
    let c = constants(p)?;
    if n < 2 {
        return Ok(0);
    }
    Ok((c2 * c.sort_constant * n as f64 * (n as f64).log2()).ceil() as u64)
}

/// [`noisy_sort`] stopped before its query count would pass
/// [`noisy_sort_budget`]; on overflow the input order comes back unchanged.
pub fn safe_noisy_sort(oracle: &mut NoisyOracle, ids: &[ElementId], params: &SortParams) -> Result<NoisySortRun> {
    let budget = noisy_sort_budget(oracle.crossover(), ids.len(), params.c2)?;
    Ok(oracle
        .within_budget(budget, |o| noisy_sort(o, ids, params))?
        .unwrap_or_else(|| NoisySortRun {
            order: ids.to_vec(),
            plan: None,
            overflowed: true,
        }))
}
