//! Simulated noisy comparison channel.
//!
//! A [`NoisyOracle`] hides a strict total order over the dense ids `0..n` and
//! answers "is `x` below `y`?" through a binary symmetric channel: the true
//! bit is flipped independently with probability `p` on every call. Every
//! answered query is counted in a ledger under the caller's tag.
//!
//! One master seed drives three independent ChaCha streams: channel noise,
//! algorithm coins, and (for harnesses) the hidden permutation itself.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_crossover, NoisyError, Result};

pub type ElementId = usize;

/// Tag charged by [`NoisyOracle::query`] until a caller sets another one.
pub const DEFAULT_TAG: &str = "untagged";

/// Tag charged by [`NoisyOracle::extract_random_bit`].
pub const BIT_EXTRACTION_TAG: &str = "bit-extract";

const NOISE_STREAM: u64 = 0;
const ALGORITHM_STREAM: u64 = 1;
const ORDER_STREAM: u64 = 2;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Uniformly random hidden order for `n` elements, drawn from the stream of
/// `seed` that is independent of both channel noise and algorithm coins.
pub fn random_ranks(n: usize, seed: u64) -> Vec<usize> {
    let mut ranks: Vec<usize> = (0..n).collect();
    ranks.shuffle(&mut stream(seed, ORDER_STREAM));
    ranks
}

/// Immutable copy of the query counters.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryLedger {
    pub total: u64,
    pub by_tag: BTreeMap<String, u64>,
    pub random_bits_extracted: u64,
}

impl QueryLedger {
    pub fn tag(&self, tag: &str) -> u64 {
        self.by_tag.get(tag).copied().unwrap_or(0)
    }

    /// Sum of two ledgers. Associative and commutative.
    pub fn merge(&self, other: &QueryLedger) -> QueryLedger {
        let mut by_tag = self.by_tag.clone();
        for (tag, count) in &other.by_tag {
            *by_tag.entry(tag.clone()).or_insert(0) += count;
        }
        QueryLedger {
            total: self.total + other.total,
            by_tag,
            random_bits_extracted: self.random_bits_extracted + other.random_bits_extracted,
        }
    }

    pub fn is_additive(&self) -> bool {
        self.by_tag.values().sum::<u64>() == self.total
    }
}

/// Handle returned by [`NoisyOracle::push_budget`]; identifies which budget a
/// [`NoisyError::BudgetExhausted`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetLevel(pub usize);

#[derive(Debug)]
pub struct NoisyOracle {
    truth_rank: Vec<usize>,
    p: f64,
    noise: ChaCha8Rng,
    coins: ChaCha8Rng,
    total: u64,
    tags: Vec<(&'static str, u64)>,
    active_tag: usize,
    random_bits: u64,
    restarts: u64,
    // absolute values of `total` at which each nested budget runs out
    budget_limits: Vec<u64>,
}

impl NoisyOracle {
    /// `truth_rank[id]` is the position of element `id` in the hidden order.
    pub fn new(truth_rank: Vec<usize>, p: f64, seed: u64) -> Result<Self> {
        check_crossover(p)?;
        let n = truth_rank.len();
        let mut seen = vec![false; n];
        for &rank in &truth_rank {
            if rank >= n || seen[rank] {
                return Err(NoisyError::NotAPermutation(n));
            }
            seen[rank] = true;
        }
        Ok(Self {
            truth_rank,
            p,
            noise: stream(seed, NOISE_STREAM),
            coins: stream(seed, ALGORITHM_STREAM),
            total: 0,
            tags: vec![(DEFAULT_TAG, 0)],
            active_tag: 0,
            random_bits: 0,
            restarts: 0,
            budget_limits: Vec::new(),
        })
    }

    /// Oracle over a uniformly random hidden order derived from `seed`.
    pub fn shuffled(n: usize, p: f64, seed: u64) -> Result<Self> {
        Self::new(random_ranks(n, seed), p, seed)
    }

    pub fn len(&self) -> usize {
        self.truth_rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.truth_rank.is_empty()
    }

    pub fn crossover(&self) -> f64 {
        self.p
    }

    pub fn rank(&self, id: ElementId) -> usize {
        self.truth_rank[id]
    }

    /// Noiseless comparison, for scoring outputs. Never charged to the ledger.
    pub fn truly_less(&self, x: ElementId, y: ElementId) -> bool {
        self.truth_rank[x] < self.truth_rank[y]
    }

    /// Ids listed in true order.
    pub fn sorted_ids(&self) -> Vec<ElementId> {
        let mut ids = vec![0; self.len()];
        for (id, &rank) in self.truth_rank.iter().enumerate() {
            ids[rank] = id;
        }
        ids
    }

    pub fn is_sorted(&self, ids: &[ElementId]) -> bool {
        ids.windows(2).all(|w| self.truly_less(w[0], w[1]))
    }

    /// Randomness reserved for the algorithm under test, independent of the
    /// channel noise.
    pub fn coins(&mut self) -> &mut ChaCha8Rng {
        &mut self.coins
    }

    fn check_pair(&self, x: ElementId, y: ElementId) -> Result<()> {
        let size = self.len();
        for id in [x, y] {
            if id >= size {
                return Err(NoisyError::UnknownElement { id, size });
            }
        }
        if x == y {
            return Err(NoisyError::SelfComparison(x));
        }
        Ok(())
    }

    fn tag_index(&mut self, tag: &'static str) -> usize {
        match self.tags.iter().position(|(t, _)| *t == tag) {
            Some(i) => i,
            None => {
                self.tags.push((tag, 0));
                self.tags.len() - 1
            }
        }
    }

    fn exhausted_budget(&self) -> Option<usize> {
        // outermost first, so an inner restart loop never swallows an outer cap
        self.budget_limits.iter().position(|&limit| self.total >= limit)
    }

    fn answer(&mut self, x: ElementId, y: ElementId, tag: usize) -> Result<bool> {
        if let Some(level) = self.exhausted_budget() {
            return Err(NoisyError::BudgetExhausted { level });
        }
        let truth = self.truth_rank[x] < self.truth_rank[y];
        let flip = self.noise.gen_bool(self.p);
        self.total += 1;
        self.tags[tag].1 += 1;
        Ok(truth ^ flip)
    }

    /// One noisy query: `1{x < y}` passed through BSC(p), charged to `tag`.
    pub fn noisy_compare(&mut self, x: ElementId, y: ElementId, tag: &'static str) -> Result<bool> {
        self.check_pair(x, y)?;
        let tag = self.tag_index(tag);
        self.answer(x, y, tag)
    }

    /// Like [`noisy_compare`](Self::noisy_compare), charged to the active tag.
    pub fn query(&mut self, x: ElementId, y: ElementId) -> Result<bool> {
        self.check_pair(x, y)?;
        self.answer(x, y, self.active_tag)
    }

    /// Sets the tag charged by [`query`](Self::query); returns the previous one.
    pub fn set_tag(&mut self, tag: &'static str) -> &'static str {
        let previous = self.tags[self.active_tag].0;
        self.active_tag = self.tag_index(tag);
        previous
    }

    pub fn active_tag(&self) -> &'static str {
        self.tags[self.active_tag].0
    }

    /// Runs `f` with `tag` active, restoring the previous tag afterwards.
    pub fn tagged<T>(&mut self, tag: &'static str, f: impl FnOnce(&mut Self) -> T) -> T {
        let previous = self.set_tag(tag);
        let out = f(self);
        self.set_tag(previous);
        out
    }

    /// Von Neumann extraction: query the pair twice until the answers differ
    /// and keep the first one. Exactly Bernoulli(1/2) whatever the true order.
    pub fn extract_random_bit(&mut self, x: ElementId, y: ElementId) -> Result<bool> {
        self.check_pair(x, y)?;
        let tag = self.tag_index(BIT_EXTRACTION_TAG);
        loop {
            let first = self.answer(x, y, tag)?;
            let second = self.answer(x, y, tag)?;
            if first != second {
                self.random_bits += 1;
                return Ok(first);
            }
        }
    }

    pub fn ledger_snapshot(&self) -> QueryLedger {
        QueryLedger {
            total: self.total,
            by_tag: self
                .tags
                .iter()
                .filter(|(_, count)| *count > 0)
                .map(|(tag, count)| (tag.to_string(), *count))
                .collect(),
            random_bits_extracted: self.random_bits,
        }
    }

    pub fn total_queries(&self) -> u64 {
        self.total
    }

    /// Allows at most `queries` further comparisons until the matching
    /// [`pop_budget`](Self::pop_budget). Budgets nest.
    pub fn push_budget(&mut self, queries: u64) -> BudgetLevel {
        self.budget_limits.push(self.total.saturating_add(queries));
        BudgetLevel(self.budget_limits.len() - 1)
    }

    pub fn pop_budget(&mut self, level: BudgetLevel) {
        debug_assert_eq!(level.0 + 1, self.budget_limits.len(), "budgets popped out of order");
        self.budget_limits.truncate(level.0);
    }

    /// Runs `f` under a budget of `queries`. `Ok(None)` means this budget (not
    /// an enclosing one) ran out.
    pub fn within_budget<T>(&mut self, queries: u64, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<Option<T>> {
        let level = self.push_budget(queries);
        let out = f(self);
        self.pop_budget(level);
        match out {
            Ok(v) => Ok(Some(v)),
            Err(NoisyError::BudgetExhausted { level: l }) if l == level.0 => Ok(None),
            Err(e) => Err(e),
        }
    }

    pub fn note_restart(&mut self) {
        self.restarts += 1;
    }

    /// Restarts performed by safe wrappers and verify-and-retry loops so far.
    pub fn restarts(&self) -> u64 {
        self.restarts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair_oracle(p: f64, seed: u64) -> NoisyOracle {
        NoisyOracle::new(vec![0, 1], p, seed).unwrap()
    }

    #[test]
    fn rejects_boundary_crossover() {
        for p in [0.0, 0.5, -0.1, 0.7, f64::NAN] {
            assert!(matches!(
                NoisyOracle::new(vec![0, 1], p, 1),
                Err(NoisyError::InvalidCrossover(_))
            ));
        }
    }

    #[test]
    fn rejects_non_permutation() {
        assert_eq!(
            NoisyOracle::new(vec![0, 0, 2], 0.1, 1).unwrap_err(),
            NoisyError::NotAPermutation(3)
        );
        assert!(NoisyOracle::new(vec![0, 3, 1], 0.1, 1).is_err());
    }

    #[test]
    fn rejects_self_and_unknown() {
        let mut o = pair_oracle(0.1, 3);
        assert_eq!(o.noisy_compare(1, 1, "t"), Err(NoisyError::SelfComparison(1)));
        assert_eq!(
            o.noisy_compare(0, 2, "t"),
            Err(NoisyError::UnknownElement { id: 2, size: 2 })
        );
        assert_eq!(o.ledger_snapshot().total, 0);
    }

    #[test]
    fn fresh_ledger_is_zero() {
        let o = pair_oracle(0.1, 3);
        assert_eq!(o.ledger_snapshot(), QueryLedger::default());
    }

    #[test]
    fn one_tagged_query() {
        let mut o = pair_oracle(0.1, 3);
        o.noisy_compare(0, 1, "search").unwrap();
        let l = o.ledger_snapshot();
        assert_eq!(l.total, 1);
        assert_eq!(l.by_tag.len(), 1);
        assert_eq!(l.tag("search"), 1);
    }

    #[test]
    fn ledger_sums_across_tags() {
        let mut o = pair_oracle(0.2, 9);
        for i in 0..30 {
            let tag = ["a", "b", "c"][i % 3];
            o.noisy_compare(0, 1, tag).unwrap();
            o.tagged("d", |o| o.query(1, 0)).unwrap();
            assert!(o.ledger_snapshot().is_additive());
        }
        let l = o.ledger_snapshot();
        assert_eq!(l.total, 60);
        assert_eq!(l.tag("d"), 30);
        assert_eq!(o.active_tag(), DEFAULT_TAG);
    }

    #[test]
    fn replay_is_deterministic() {
        let run = |seed| {
            let mut o = NoisyOracle::shuffled(8, 0.3, seed).unwrap();
            let answers: Vec<bool> = (0..200)
                .map(|i| o.noisy_compare(i % 8, (i * 3 + 1) % 8, "t").unwrap_or(false))
                .collect();
            (answers, o.ledger_snapshot())
        };
        assert_eq!(run(42), run(42));
        assert_ne!(run(42).0, run(43).0);
    }

    #[test]
    fn budgets_nest_and_report_outermost() {
        let mut o = pair_oracle(0.1, 5);
        let outer = o.push_budget(3);
        let inner = o.push_budget(10);
        for _ in 0..3 {
            o.query(0, 1).unwrap();
        }
        assert_eq!(o.query(0, 1), Err(NoisyError::BudgetExhausted { level: outer.0 }));
        o.pop_budget(inner);
        o.pop_budget(outer);
        assert!(o.query(0, 1).is_ok());

        let r = o.within_budget(2, |o| loop {
            o.query(0, 1)?;
        });
        assert_eq!(r, Ok(None::<()>));
        assert_eq!(o.total_queries(), 6);
    }

    #[test]
    fn flip_rate_is_calibrated() {
        // Binomial(1e5, 0.1): sd = sqrt(1e5 * 0.09) ~ 94.9, so 3 sd ~ 0.0028 in
        // fraction; 0.004 is the looser agreed envelope.
        let mut o = pair_oracle(0.1, 11);
        let n = 100_000;
        let flips = (0..n).filter(|_| !o.noisy_compare(0, 1, "t").unwrap()).count();
        let rate = flips as f64 / n as f64;
        assert!((rate - 0.1).abs() <= 0.004, "flip rate {rate}");
        assert_eq!(o.ledger_snapshot().total, n as u64);
    }

    #[test]
    fn extracted_bits_are_unbiased_either_way() {
        for ranks in [vec![0, 1], vec![1, 0]] {
            let mut o = NoisyOracle::new(ranks, 0.1, 17).unwrap();
            let n = 100_000u64;
            let ones = (0..n).filter(|_| o.extract_random_bit(0, 1).unwrap()).count() as f64;
            let frac = ones / n as f64;
            // 3 sd of Binomial(1e5, 1/2) in fraction is 0.0047
            assert!((frac - 0.5).abs() <= 0.005, "ones fraction {frac}");
            let l = o.ledger_snapshot();
            assert_eq!(l.random_bits_extracted, n);
            let per_bit = l.total as f64 / n as f64;
            assert!((per_bit / (1.0 / 0.09) - 1.0).abs() < 0.05, "{per_bit}");
            assert_eq!(l.tag(BIT_EXTRACTION_TAG), l.total);
        }
    }

    #[test]
    fn merge_is_order_independent() {
        let mut a = pair_oracle(0.1, 1);
        let mut b = pair_oracle(0.1, 2);
        a.noisy_compare(0, 1, "x").unwrap();
        b.noisy_compare(0, 1, "y").unwrap();
        b.extract_random_bit(0, 1).unwrap();
        let (la, lb) = (a.ledger_snapshot(), b.ledger_snapshot());
        assert_eq!(la.merge(&lb), lb.merge(&la));
        assert!(la.merge(&lb).is_additive());
    }

    #[test]
    fn sorted_ids_inverts_ranks() {
        let o = NoisyOracle::shuffled(50, 0.1, 8).unwrap();
        let ids = o.sorted_ids();
        assert!(o.is_sorted(&ids));
        for (rank, &id) in ids.iter().enumerate() {
            assert_eq!(o.rank(id), rank);
        }
    }
}
