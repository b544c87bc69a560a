//! Bounded-attempt restart wrapper.
//!
//! Given a procedure whose expected query count is at most `m`, run it with a
//! hard cap of `k = ceil(m log2 m)` queries; if the cap would be crossed,
//! abandon the attempt and start over with fresh channel noise. Markov's
//! inequality bounds the restart probability by `m/k = 1/log2 m`, which keeps
//! both the error inflation and the mean overhead at `1/(1 - m/k)`, and the
//! second moment at `O(m^2 log^2 m)`.

use crate::error::Result;
use crate::oracle::NoisyOracle;

/// Per-attempt query cap for an expected cost of `m`.
///
/// Below `m = 2` the `m log2 m` rule degenerates (zero or negative), so the
/// cap is floored at `ceil(2m)` and at one query there.
pub fn attempt_budget(m: f64) -> u64 {
    let k = (m * m.log2()).ceil();
    if m < 2.0 {
        let floored = k.max((2.0 * m).ceil()).max(1.0);
        floored as u64
    } else {
        k as u64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Wrapped<T> {
    pub value: T,
    pub restarts: u64,
}

/// Runs `attempt` until it finishes within [`attempt_budget`]`(m)` queries.
///
/// Only this wrapper's own budget triggers a restart; exhaustion of an
/// enclosing budget is passed through unchanged.
pub fn restart_wrap<T>(
    oracle: &mut NoisyOracle,
    m: f64,
    mut attempt: impl FnMut(&mut NoisyOracle) -> Result<T>,
) -> Result<Wrapped<T>> {
    let k = attempt_budget(m);
    let mut restarts = 0;
    loop {
        if let Some(value) = oracle.within_budget(k, &mut attempt)? {
            return Ok(Wrapped { value, restarts });
        }
        restarts += 1;
        oracle.note_restart();
    }
}
