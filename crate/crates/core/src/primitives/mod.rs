//! Channel constants and pairwise comparison primitives.

pub mod compare;
pub mod constants;
pub mod restart;

pub use compare::{
    less_than, less_than_run, majority_compare, majority_error, majority_repetitions, safe_less_than, LessThanRun,
    PosteriorOdds,
};
pub use constants::{
    binary_entropy, capacity, constants, f_p, log_odds_step, search_bound, search_floor, threshold_steps, walk_rate,
    ConstantsRecord,
};
pub use restart::{attempt_budget, restart_wrap, Wrapped};
